#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace icmpd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Exhaustive 2^24 sweep: the key and its XOR-128 partner are observationally
/// identical under every (alpha, beta).
CheckResult check_equivalent_key_exhaustive();

/// Builds the 128-entry two-query table and solves back all 256 keys mod 2^7.
CheckResult check_two_query_solver();

/// f is constant on every 4-member (s,t) class: 64 random queries per class
/// for all 8192 classes, full 2^16 query exhaustion for `full_classes` of them.
CheckResult check_class_constancy(std::uint64_t seed, unsigned full_classes = 16);

/// Builds the 7-query and 8-query tables collision-free and round-trips all
/// 32768 odd-s pairs through forward evaluation, lookup and canonicalization.
CheckResult check_affine_solver_tables();

/// Within-class distinctness of the eight observation values plus cross-class
/// injectivity of the sorted multisets.
CheckResult check_multiset_audit();

std::vector<CheckResult> run_all_checks(std::uint64_t seed);

}  // namespace icmpd
