// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace fedxlat {

/// splitmix64 step; used to derive independent sub-seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Combine a seed with a stream tag (round index, client index, ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix_seed(seed ^ mix_seed(tag));
}

/// Uniform double in [0, 1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection sampling; unbiased and
/// platform-independent, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % bound + 1) % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = rng();
        if (rem == 0 || r <= max - rem) return r % bound;
    }
}

/// In-place Fisher-Yates shuffle driven by uniform_below.
template <typename T>
void shuffle_values(std::vector<T>& values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

/// Deterministic standard Gaussian via Box-Muller. Two engine draws per call;
/// no internal state, so streams stay reproducible across platforms.
inline double gaussian(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // guard log(0)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return radius * std::cos(two_pi * u2);
}

}  // namespace fedxlat
