// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fedxlat/errors.hpp"

namespace fedxlat {

enum class StatTest {
    MannWhitneyU,
    WilcoxonSignedRank,
};

const char* to_string(StatTest test);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;  // always in (0, 1]
    StatTest method = StatTest::MannWhitneyU;
    std::size_t n = 0;  // first sample size, or retained pair count
    std::size_t m = 0;  // second sample size, 0 for the paired test
    bool exact = false;
};

// Two-sided Mann-Whitney U. The reported statistic is U of the first sample
// (ties counted half). Exact enumeration over all C(n+m, n) labelings when
// n+m <= 20, otherwise a tie-corrected normal approximation with continuity
// correction.
TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided Wilcoxon signed-rank on (a, b) pairs. Zero differences are
// dropped; |d| ranked with average ranks for ties; W = min(W+, W-). Exact
// enumeration over the 2^n sign patterns when n <= 20, otherwise a
// tie-corrected normal approximation with continuity correction.
TestResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs);

}  // namespace fedxlat
