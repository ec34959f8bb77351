#include "icmpd/verify.hpp"

#include <chrono>
#include <random>

#include "icmpd/solver.hpp"

namespace icmpd {

namespace {

class Stopwatch {
public:
    double elapsed() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

CheckResult finish(Stopwatch sw, std::string name, bool passed, std::string detail) {
    return CheckResult{std::move(name), passed, std::move(detail), sw.elapsed()};
}

}  // namespace

CheckResult check_equivalent_key_exhaustive() {
    Stopwatch sw;
    std::uint64_t mismatches = 0;
    for (unsigned alpha = 0; alpha < 256; ++alpha) {
        for (unsigned beta = 0; beta < 256; ++beta) {
            for (unsigned k = 0; k < 256; ++k) {
                const auto a8 = static_cast<std::uint8_t>(alpha);
                const auto b8 = static_cast<std::uint8_t>(beta);
                const auto k8 = static_cast<std::uint8_t>(k);
                if (modadd_xor(a8, b8, k8) !=
                    modadd_xor(a8, b8, static_cast<std::uint8_t>(k8 ^ 0x80u))) {
                    ++mismatches;
                }
            }
        }
    }
    return finish(sw, "equivalent-key (2^24 exhaustive)", mismatches == 0,
                  mismatches == 0 ? "16777216 cases, 0 mismatches"
                                  : std::to_string(mismatches) + " mismatches");
}

CheckResult check_two_query_solver() {
    Stopwatch sw;
    try {
        const TwoQueryTable table = TwoQueryTable::build();
        if (table.size() != 128) {
            return finish(sw, "two-query solver table", false,
                          "expected 128 entries, got " + std::to_string(table.size()));
        }
        for (unsigned k = 0; k < 256; ++k) {
            const auto y = TwoQueryTable::forward(static_cast<std::uint8_t>(k));
            if (table.solve(y[0], y[1]) != (k & 0x7Fu)) {
                return finish(sw, "two-query solver table", false,
                              "wrong solution for k=" + std::to_string(k));
            }
        }
        return finish(sw, "two-query solver table", true,
                      "128 collision-free entries, all 256 keys solved mod 2^7");
    } catch (const std::exception& e) {
        return finish(sw, "two-query solver table", false, e.what());
    }
}

CheckResult check_class_constancy(std::uint64_t seed, unsigned full_classes) {
    Stopwatch sw;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<unsigned> byte_dist(0, 255);
    std::uint64_t checked = 0;
    for (unsigned s = 1; s < 128; s += 2) {
        for (unsigned t = 0; t < 128; ++t) {
            const auto members =
                equivalence_class({static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)});
            for (unsigned q = 0; q < 64; ++q) {
                const auto alpha = static_cast<std::uint8_t>(byte_dist(rng));
                const auto beta = static_cast<std::uint8_t>(byte_dist(rng));
                const std::uint8_t ref = affine_modadd_xor(alpha, beta, members[0]);
                for (unsigned m = 1; m < 4; ++m) {
                    if (affine_modadd_xor(alpha, beta, members[m]) != ref) {
                        return finish(sw, "class constancy", false,
                                      "class (" + std::to_string(s) + "," + std::to_string(t) +
                                          ") member disagrees");
                    }
                }
                ++checked;
            }
        }
    }
    std::uniform_int_distribution<unsigned> s_dist(0, 63), t_dist(0, 127);
    for (unsigned n = 0; n < full_classes; ++n) {
        const auto s = static_cast<std::uint8_t>(2 * s_dist(rng) + 1);
        const auto t = static_cast<std::uint8_t>(t_dist(rng));
        const auto members = equivalence_class({s, t});
        for (unsigned alpha = 0; alpha < 256; ++alpha) {
            for (unsigned beta = 0; beta < 256; ++beta) {
                const std::uint8_t ref = affine_modadd_xor(
                    static_cast<std::uint8_t>(alpha), static_cast<std::uint8_t>(beta), members[0]);
                for (unsigned m = 1; m < 4; ++m) {
                    if (affine_modadd_xor(static_cast<std::uint8_t>(alpha),
                                          static_cast<std::uint8_t>(beta), members[m]) != ref) {
                        return finish(sw, "class constancy", false,
                                      "exhaustive class (" + std::to_string(s) + "," +
                                          std::to_string(t) + ") member disagrees");
                    }
                }
                ++checked;
            }
        }
    }
    return finish(sw, "class constancy", true,
                  "all 8192 classes sampled (64 queries each) plus " +
                      std::to_string(full_classes) + " classes exhausted; " +
                      std::to_string(checked) + " query points");
}

CheckResult check_affine_solver_tables() {
    Stopwatch sw;
    try {
        const SevenQueryTable seven_query = SevenQueryTable::build();
        const EightQueryTable eight_query = EightQueryTable::build();
        if (seven_query.size() != 8192 || eight_query.size() != 8192) {
            return finish(sw, "affine solver tables", false,
                          "expected 8192 entries each, got " + std::to_string(seven_query.size()) +
                              " and " + std::to_string(eight_query.size()));
        }
        for (unsigned s = 1; s < 256; s += 2) {
            for (unsigned t = 0; t < 256; ++t) {
                const AffinePair raw{static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(t)};
                const AffinePair canon = canonicalize(raw);
                if (seven_query.solve(SevenQueryTable::forward(raw)) != canon ||
                    eight_query.solve(EightQueryTable::forward(raw)) != canon) {
                    return finish(sw, "affine solver tables", false,
                                  "round trip failed for (s,t)=(" + std::to_string(s) + "," +
                                      std::to_string(t) + ")");
                }
            }
        }
        return finish(sw, "affine solver tables", true,
                      "both tables built collision-free with 8192 entries; forward-then-solve "
                      "matches canonicalize for all 32768 odd-s pairs");
    } catch (const std::exception& e) {
        return finish(sw, "affine solver tables", false, e.what());
    }
}

CheckResult check_multiset_audit() {
    Stopwatch sw;
    try {
        const MultisetIndex index = MultisetIndex::build(EightQueryTable::build());
        const std::size_t ambiguous = index.ambiguous_key_count();
        const bool passed = index.class_count() == 8192 && ambiguous == 0;
        return finish(sw, "multiset index audit", passed,
                      std::to_string(index.class_count()) + " classes under " +
                          std::to_string(index.key_count()) + " sorted keys, " +
                          std::to_string(ambiguous) + " ambiguous");
    } catch (const std::exception& e) {
        // add() throws when a class has duplicate observation values.
        return finish(sw, "multiset index audit", false, e.what());
    }
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
    return {check_equivalent_key_exhaustive(), check_two_query_solver(),
            check_class_constancy(seed), check_affine_solver_tables(), check_multiset_audit()};
}

}  // namespace icmpd
