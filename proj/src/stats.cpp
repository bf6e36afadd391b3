// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace fedxlat {

const char* to_string(StatTest test) {
    return test == StatTest::MannWhitneyU ? "mann_whitney_u" : "wilcoxon_signed_rank";
}

namespace {

constexpr std::size_t kExactLimit = 20;

double two_sided_from_tails(double tail_le, double tail_ge) {
    const double p = 2.0 * std::min(tail_le, tail_ge);
    return std::min(p, 1.0);
}

double normal_two_sided(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

// Doubled U statistic of the index set `in_x` against its complement, over the
// sorted combined values. Doubling keeps tie halves integral.
std::uint64_t doubled_u(const std::vector<double>& values, const std::vector<bool>& in_x) {
    std::uint64_t u2 = 0;
    const std::size_t total = values.size();
    for (std::size_t i = 0; i < total; ++i) {
        if (!in_x[i]) continue;
        for (std::size_t j = 0; j < total; ++j) {
            if (in_x[j]) continue;
            if (values[i] > values[j]) {
                u2 += 2;
            } else if (values[i] == values[j]) {
                u2 += 1;
            }
        }
    }
    return u2;
}

// Sum of (t^3 - t) over tie groups, used by both normal approximations.
double tie_term(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double term = 0.0;
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        const double t = static_cast<double>(j - i);
        term += t * t * t - t;
        i = j;
    }
    return term;
}

}  // namespace

TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) {
        throw ArgumentError("mann_whitney_u: empty sample");
    }
    const std::size_t n = x.size();
    const std::size_t m = y.size();

    std::uint64_t u2_obs = 0;
    for (double xi : x) {
        for (double yj : y) {
            if (xi > yj) {
                u2_obs += 2;
            } else if (xi == yj) {
                u2_obs += 1;
            }
        }
    }

    TestResult result;
    result.method = StatTest::MannWhitneyU;
    result.statistic = static_cast<double>(u2_obs) / 2.0;
    result.n = n;
    result.m = m;

    if (n + m <= kExactLimit) {
        std::vector<double> combined(x);
        combined.insert(combined.end(), y.begin(), y.end());
        std::sort(combined.begin(), combined.end());
        const std::size_t total = n + m;

        // Walk every C(n+m, n) assignment of combined positions to sample x.
        std::vector<std::size_t> pick(n);
        std::iota(pick.begin(), pick.end(), 0);
        std::uint64_t count_le = 0;
        std::uint64_t count_ge = 0;
        std::uint64_t count_total = 0;
        std::vector<bool> in_x(total, false);
        for (;;) {
            std::fill(in_x.begin(), in_x.end(), false);
            for (std::size_t idx : pick) in_x[idx] = true;
            const std::uint64_t u2 = doubled_u(combined, in_x);
            if (u2 <= u2_obs) ++count_le;
            if (u2 >= u2_obs) ++count_ge;
            ++count_total;

            // Advance to the next combination in lexicographic order.
            std::size_t k = n;
            while (k > 0 && pick[k - 1] == total - n + (k - 1)) --k;
            if (k == 0) break;
            ++pick[k - 1];
            for (std::size_t j = k; j < n; ++j) pick[j] = pick[j - 1] + 1;
        }
        const double tail_le = static_cast<double>(count_le) / static_cast<double>(count_total);
        const double tail_ge = static_cast<double>(count_ge) / static_cast<double>(count_total);
        result.p_value = two_sided_from_tails(tail_le, tail_ge);
        result.exact = true;
        return result;
    }

    const double nm = static_cast<double>(n) * static_cast<double>(m);
    const double total = static_cast<double>(n + m);
    std::vector<double> combined(x);
    combined.insert(combined.end(), y.begin(), y.end());
    const double ties = tie_term(combined);
    const double variance =
        nm / 12.0 * ((total + 1.0) - ties / (total * (total - 1.0)));
    const double u = static_cast<double>(u2_obs) / 2.0;
    const double mean = nm / 2.0;
    if (variance <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    double delta = u - mean;
    // Continuity correction: shrink toward the mean by half a unit.
    if (delta > 0.5) {
        delta -= 0.5;
    } else if (delta < -0.5) {
        delta += 0.5;
    } else {
        delta = 0.0;
    }
    result.p_value = normal_two_sided(delta / std::sqrt(variance));
    return result;
}

TestResult wilcoxon_signed_rank(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.empty()) {
        throw ArgumentError("wilcoxon_signed_rank: empty pair list");
    }
    std::vector<double> diffs;
    diffs.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const double d = a - b;
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        throw DegenerateInputError("wilcoxon_signed_rank: all differences are zero");
    }
    const std::size_t n = diffs.size();

    // Rank |d| ascending; average ranks for ties. Doubled ranks stay integral
    // because a tie group's average is (first + last) / 2.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diffs[a]) < std::abs(diffs[b]);
    });
    std::vector<std::uint64_t> rank2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
        const std::uint64_t doubled = static_cast<std::uint64_t>(i + 1 + j);  // (i+1) + j
        for (std::size_t k = i; k < j; ++k) rank2[order[k]] = doubled;
        i = j;
    }

    std::uint64_t w2_plus = 0;
    std::uint64_t w2_total = 0;
    for (std::size_t k = 0; k < n; ++k) {
        w2_total += rank2[k];
        if (diffs[k] > 0.0) w2_plus += rank2[k];
    }
    const std::uint64_t w2_minus = w2_total - w2_plus;

    TestResult result;
    result.method = StatTest::WilcoxonSignedRank;
    result.statistic = static_cast<double>(std::min(w2_plus, w2_minus)) / 2.0;
    result.n = n;
    result.m = 0;

    if (n <= kExactLimit) {
        // Null distribution of W+ by subset-sum counting over doubled ranks.
        std::vector<std::uint64_t> counts(w2_total + 1, 0);
        counts[0] = 1;
        for (std::size_t k = 0; k < n; ++k) {
            const std::uint64_t r = rank2[k];
            for (std::size_t s = counts.size(); s-- > r;) {
                counts[s] += counts[s - r];
            }
        }
        std::uint64_t count_le = 0;
        std::uint64_t count_ge = 0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (s <= w2_plus) count_le += counts[s];
            if (s >= w2_plus) count_ge += counts[s];
        }
        const double total = std::ldexp(1.0, static_cast<int>(n));  // 2^n patterns
        result.p_value = two_sided_from_tails(static_cast<double>(count_le) / total,
                                              static_cast<double>(count_ge) / total);
        result.exact = true;
        return result;
    }

    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    std::vector<double> abs_diffs(n);
    for (std::size_t k = 0; k < n; ++k) abs_diffs[k] = std::abs(diffs[k]);
    const double variance =
        nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term(abs_diffs) / 48.0;
    if (variance <= 0.0) {
        result.p_value = 1.0;
        return result;
    }
    const double w = result.statistic;
    double delta = w - mean;
    if (delta > 0.5) {
        delta -= 0.5;
    } else if (delta < -0.5) {
        delta += 0.5;
    } else {
        delta = 0.0;
    }
    result.p_value = normal_two_sided(delta / std::sqrt(variance));
    return result;
}

}  // namespace fedxlat
