#include "icmpd/solver.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace icmpd {

namespace {

void require_odd(std::uint8_t s, const char* where) {
    if ((s & 1u) == 0) {
        throw std::invalid_argument(std::string(where) + ": s must be odd");
    }
}

std::uint64_t pack_tuple(const std::uint8_t* y, std::size_t n) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < n; ++i) {
        key = (key << 8) | y[i];
    }
    return key;
}

}  // namespace

std::uint8_t modadd_xor(std::uint8_t alpha, std::uint8_t beta, std::uint8_t k) noexcept {
    return static_cast<std::uint8_t>(static_cast<std::uint8_t>(alpha + k) ^
                                     static_cast<std::uint8_t>(beta + k));
}

std::uint8_t affine_modadd_xor(std::uint8_t alpha, std::uint8_t beta, AffinePair pair) {
    require_odd(pair.s, "affine_modadd_xor");
    return static_cast<std::uint8_t>(static_cast<std::uint8_t>(alpha * pair.s + pair.t) ^
                                     static_cast<std::uint8_t>(beta * pair.s + pair.t));
}

std::array<std::uint8_t, 2> equivalent_keys_modadd(std::uint8_t k) noexcept {
    return {k, static_cast<std::uint8_t>(k ^ 0x80u)};
}

std::array<AffinePair, 4> equivalence_class(AffinePair pair) {
    require_odd(pair.s, "equivalence_class");
    const std::uint8_t s = pair.s;
    const std::uint8_t t = pair.t;
    const std::uint8_t neg_s = static_cast<std::uint8_t>(256 - s);
    return {AffinePair{s, t},
            AffinePair{s, static_cast<std::uint8_t>(t + 128)},
            AffinePair{neg_s, static_cast<std::uint8_t>(127 - t)},
            AffinePair{neg_s, static_cast<std::uint8_t>(255 - t)}};
}

AffinePair canonicalize(AffinePair pair) {
    for (const AffinePair& member : equivalence_class(pair)) {
        if (member.s < 128 && member.t < 128) {
            return member;
        }
    }
    // Unreachable: exactly one member satisfies both bounds.
    throw std::logic_error("canonicalize: no canonical member found");
}

std::uint8_t mod_inverse(std::uint8_t s) {
    require_odd(s, "mod_inverse");
    static constexpr auto table = [] {
        std::array<std::uint8_t, 128> inv{};
        for (unsigned s_odd = 1; s_odd < 256; s_odd += 2) {
            for (unsigned x = 1; x < 256; x += 2) {
                if (((s_odd * x) & 0xFFu) == 1u) {
                    inv[s_odd / 2] = static_cast<std::uint8_t>(x);
                    break;
                }
            }
        }
        return inv;
    }();
    return table[s / 2];
}

TwoQueryTable TwoQueryTable::build() {
    TwoQueryTable table;
    for (unsigned k = 0; k < 128; ++k) {
        const auto y = forward(static_cast<std::uint8_t>(k));
        std::int16_t& slot = table.lut_[y[0] * 256u + y[1]];
        if (slot != -1) {
            throw std::logic_error("TwoQueryTable: (y1,y2) collision for keys " +
                                   std::to_string(slot) + " and " + std::to_string(k));
        }
        slot = static_cast<std::int16_t>(k);
        ++table.count_;
    }
    return table;
}

std::array<std::uint8_t, 2> TwoQueryTable::forward(std::uint8_t k) noexcept {
    return {modadd_xor(0, 170, k), modadd_xor(170, 85, k)};
}

std::uint8_t TwoQueryTable::solve(std::uint8_t y1, std::uint8_t y2) const {
    const std::int16_t k = lut_[y1 * 256u + y2];
    if (k < 0) {
        throw InconsistentObservation("TwoQueryTable: inconsistent observations (" +
                                      std::to_string(y1) + ", " + std::to_string(y2) + ")");
    }
    return static_cast<std::uint8_t>(k);
}

void TwoQueryTable::dump_csv(std::ostream& os) const {
    for (unsigned y1 = 0; y1 < 256; ++y1) {
        for (unsigned y2 = 0; y2 < 256; ++y2) {
            const std::int16_t k = lut_[y1 * 256 + y2];
            if (k >= 0) {
                os << "two_query," << k << ",,," << y1 << "," << y2 << ",,,,,,\n";
            }
        }
    }
}

SevenQueryTable SevenQueryTable::build() {
    SevenQueryTable table;
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const AffinePair pair{static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)};
            const auto y = forward(pair);
            auto [it, inserted] = table.map_.emplace(pack_tuple(y.data(), y.size()), pair);
            if (!inserted) {
                throw std::logic_error("SevenQueryTable: 7-tuple collision between classes");
            }
        }
    }
    return table;
}

std::array<std::uint8_t, 7> SevenQueryTable::forward(AffinePair pair) {
    std::array<std::uint8_t, 7> y{};
    for (unsigned m = 0; m < 7; ++m) {
        y[m] = affine_modadd_xor(static_cast<std::uint8_t>(1u << m),
                                 static_cast<std::uint8_t>(1u << (m + 1)), pair);
    }
    return y;
}

AffinePair SevenQueryTable::solve(const std::array<std::uint8_t, 7>& y) const {
    const auto it = map_.find(pack_tuple(y.data(), y.size()));
    if (it == map_.end()) {
        throw InconsistentObservation("SevenQueryTable: inconsistent observations");
    }
    return it->second;
}

void SevenQueryTable::dump_csv(std::ostream& os) const {
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const auto y = forward({static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)});
            os << "seven_query,," << s << "," << t;
            for (const std::uint8_t v : y) os << "," << unsigned{v};
            os << ",\n";
        }
    }
}

EightQueryTable EightQueryTable::build() {
    EightQueryTable table;
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const AffinePair pair{static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)};
            const auto y = forward(pair);
            auto [it, inserted] = table.map_.emplace(pack_tuple(y.data(), y.size()), pair);
            if (!inserted) {
                throw std::logic_error("EightQueryTable: 8-tuple collision between classes");
            }
        }
    }
    return table;
}

std::array<std::uint8_t, 8> EightQueryTable::forward(AffinePair pair) {
    std::array<std::uint8_t, 8> y{};
    for (unsigned m = 0; m < 8; ++m) {
        y[m] = affine_modadd_xor(static_cast<std::uint8_t>(1u << m), 0, pair);
    }
    return y;
}

AffinePair EightQueryTable::solve(const std::array<std::uint8_t, 8>& y) const {
    const auto it = map_.find(pack_tuple(y.data(), y.size()));
    if (it == map_.end()) {
        throw InconsistentObservation("EightQueryTable: inconsistent observations");
    }
    return it->second;
}

void EightQueryTable::dump_csv(std::ostream& os) const {
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const auto y = forward({static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)});
            os << "eight_query,," << s << "," << t;
            for (const std::uint8_t v : y) os << "," << unsigned{v};
            os << "\n";
        }
    }
}

MultisetIndex MultisetIndex::build(const EightQueryTable& table) {
    MultisetIndex index;
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const AffinePair pair{static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)};
            const auto y = EightQueryTable::forward(pair);
            if (table.solve(y) != pair) {
                throw std::logic_error("MultisetIndex: table disagrees with forward evaluation");
            }
            index.add({pair, y});
        }
    }
    return index;
}

void MultisetIndex::add(const Entry& entry) {
    std::array<std::uint8_t, 8> sorted = entry.ordered;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) {
            throw std::logic_error("MultisetIndex: class has duplicate observation values");
        }
    }
    map_[pack_tuple(sorted.data(), sorted.size())].push_back(entry);
    ++classes_;
}

const std::vector<MultisetIndex::Entry>* MultisetIndex::candidates(
    std::array<std::uint8_t, 8> y) const {
    std::sort(y.begin(), y.end());
    const auto it = map_.find(pack_tuple(y.data(), y.size()));
    return it == map_.end() ? nullptr : &it->second;
}

std::size_t MultisetIndex::ambiguous_key_count() const noexcept {
    std::size_t n = 0;
    for (const auto& [key, entries] : map_) {
        if (entries.size() > 1) {
            ++n;
        }
    }
    return n;
}

}  // namespace icmpd
