// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fedxlat/matrix.hpp"

namespace fedxlat {

/// One named low-rank pair. The adapted weight slot gets the update
/// (alpha / rank) * a_factor * b_factor, shape m x n.
struct LoraAdapter {
    std::string name;
    WeightMatrix a_factor;  // m x rank
    WeightMatrix b_factor;  // rank x n
    std::size_t rank = 0;
    double alpha = 16.0;

    std::size_t out_rows() const { return a_factor.rows; }
    std::size_t out_cols() const { return b_factor.cols; }

    bool operator==(const LoraAdapter& other) const {
        return name == other.name && rank == other.rank && alpha == other.alpha &&
               a_factor == other.a_factor && b_factor == other.b_factor;
    }
};

/// Ordered collection of adapters, one per weight slot. Keys are slot names;
/// map ordering doubles as the canonical serialization order.
struct AdapterSet {
    std::map<std::string, LoraAdapter> entries;

    bool operator==(const AdapterSet& other) const { return entries == other.entries; }
};

/// Throws unless the adapter satisfies its invariants: factor shapes agree
/// with rank, rank >= 1, all entries finite, alpha > 0.
void check_adapter(const LoraAdapter& adapter);

/// Throws unless slot names match entry keys and all entries share one rank.
void check_adapter_set(const AdapterSet& set);

/// Rank shared by every entry of a non-empty set.
std::size_t set_rank(const AdapterSet& set);

/// Fresh adapter: a_factor from a seeded zero-mean Gaussian with standard
/// deviation 1/rank, b_factor all zeros. Same seed gives a bit-identical
/// adapter. Requires 1 <= rank <= min(m, n).
LoraAdapter new_adapter(std::size_t m, std::size_t n, std::size_t rank, double alpha,
                        std::uint64_t seed, std::string name = "");

/// (alpha / rank) * a_factor * b_factor, shape m x n.
WeightMatrix delta(const LoraAdapter& adapter);

/// base + delta(adapter); base is not modified.
WeightMatrix merge(const WeightMatrix& base, const LoraAdapter& adapter);

}  // namespace fedxlat
