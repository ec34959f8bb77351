#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace icmpd {

/// Raised when observed values cannot come from any genuine key, e.g. a
/// lookup tuple absent from an exhaustively built table.
class InconsistentObservation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An (s, t) byte pair with s odd. The canonical representative of its
/// equivalence class has s < 128 and t < 128.
struct AffinePair {
    std::uint8_t s = 1;
    std::uint8_t t = 0;

    bool operator==(const AffinePair&) const = default;
};

/// ((alpha + k) mod 256) XOR ((beta + k) mod 256).
std::uint8_t modadd_xor(std::uint8_t alpha, std::uint8_t beta, std::uint8_t k) noexcept;

/// ((alpha*s + t) mod 256) XOR ((beta*s + t) mod 256); s must be odd.
std::uint8_t affine_modadd_xor(std::uint8_t alpha, std::uint8_t beta, AffinePair pair);

/// The two keys indistinguishable under modadd_xor: {k, k XOR 128}.
std::array<std::uint8_t, 2> equivalent_keys_modadd(std::uint8_t k) noexcept;

/// The four pairs indistinguishable under affine_modadd_xor:
/// (s,t), (s, t+128), (256-s, 127-t), (256-s, 255-t), all mod 256.
std::array<AffinePair, 4> equivalence_class(AffinePair pair);

/// The unique class member with s in [1,127] and t in [0,127].
AffinePair canonicalize(AffinePair pair);

/// Multiplicative inverse mod 256; s must be odd.
std::uint8_t mod_inverse(std::uint8_t s);

/// Lookup table solving y = (a + k) XOR (b + k) (mod-256 sums) from the two
/// query pairs (0, 170) and (170, 85). Built by enumerating k in [0,127];
/// the collision-free build is itself the uniqueness proof.
class TwoQueryTable {
public:
    static TwoQueryTable build();

    /// Observed (y1, y2) under the two fixed queries for key k.
    static std::array<std::uint8_t, 2> forward(std::uint8_t k) noexcept;

    /// The unique k in [0,127]; throws InconsistentObservation when the pair
    /// cannot arise from any key.
    std::uint8_t solve(std::uint8_t y1, std::uint8_t y2) const;

    std::size_t size() const noexcept { return count_; }
    void dump_csv(std::ostream& os) const;

private:
    TwoQueryTable() : lut_(256 * 256, -1) {}

    std::vector<std::int16_t> lut_;
    std::size_t count_ = 0;
};

/// Lookup table solving y = (alpha*s + t) XOR (beta*s + t) from the seven
/// query pairs (2^m, 2^(m+1)), m = 0..6. One entry per canonical (s, t).
class SevenQueryTable {
public:
    static SevenQueryTable build();
    static std::array<std::uint8_t, 7> forward(AffinePair pair);
    AffinePair solve(const std::array<std::uint8_t, 7>& y) const;
    std::size_t size() const noexcept { return map_.size(); }
    void dump_csv(std::ostream& os) const;

private:
    std::unordered_map<std::uint64_t, AffinePair> map_;
};

/// Same solver from the eight query pairs (2^m, 0), m = 0..7. These are the
/// observations a single-bit-flip experiment produces, so this is the table
/// the attack uses.
class EightQueryTable {
public:
    static EightQueryTable build();
    static std::array<std::uint8_t, 8> forward(AffinePair pair);
    AffinePair solve(const std::array<std::uint8_t, 8>& y) const;
    std::size_t size() const noexcept { return map_.size(); }
    void dump_csv(std::ostream& os) const;

private:
    std::unordered_map<std::uint64_t, AffinePair> map_;
};

/// Index over EightQueryTable keyed by the *sorted* 8-tuple. An attacker observes
/// the eight y-values of a pixel in unknown bit-plane order; this index maps
/// the unordered multiset back to the canonical pair together with the
/// value -> bit-plane assignment. Build verifies that the eight values of
/// every class are pairwise distinct and counts multiset keys shared between
/// classes; shared keys are resolved at attack time by extra queries.
class MultisetIndex {
public:
    struct Entry {
        AffinePair pair;                      // canonical representative
        std::array<std::uint8_t, 8> ordered;  // ordered[k] = y observed for bit plane k
    };

    MultisetIndex() = default;

    static MultisetIndex build(const EightQueryTable& table);

    /// Register one class under its sorted key (build uses this; tests can
    /// inject extra candidates to exercise the disambiguation path).
    void add(const Entry& entry);

    /// Candidates whose sorted tuple equals sorted(y); null when none.
    const std::vector<Entry>* candidates(std::array<std::uint8_t, 8> y) const;

    std::size_t class_count() const noexcept { return classes_; }
    std::size_t key_count() const noexcept { return map_.size(); }
    std::size_t ambiguous_key_count() const noexcept;

private:
    std::unordered_map<std::uint64_t, std::vector<Entry>> map_;
    std::size_t classes_ = 0;
};

}  // namespace icmpd
