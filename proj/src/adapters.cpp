// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/adapters.hpp"

#include <algorithm>
#include <cmath>

#include "fedxlat/rng.hpp"

namespace fedxlat {

void check_adapter(const LoraAdapter& adapter) {
    if (adapter.rank < 1) {
        throw DimensionError("adapter '" + adapter.name + "': rank must be >= 1");
    }
    if (adapter.a_factor.cols != adapter.rank || adapter.b_factor.rows != adapter.rank) {
        throw DimensionError("adapter '" + adapter.name +
                             "': factor shapes do not agree with rank");
    }
    if (!(adapter.alpha > 0.0) || !std::isfinite(adapter.alpha)) {
        throw DimensionError("adapter '" + adapter.name + "': alpha must be positive");
    }
    if (!adapter.a_factor.all_finite() || !adapter.b_factor.all_finite()) {
        throw NumericError("adapter '" + adapter.name + "': non-finite entry");
    }
}

void check_adapter_set(const AdapterSet& set) {
    std::size_t rank = 0;
    for (const auto& [slot, adapter] : set.entries) {
        if (slot != adapter.name) {
            throw DimensionError("adapter set: key '" + slot + "' does not match adapter name '" +
                                 adapter.name + "'");
        }
        check_adapter(adapter);
        if (rank == 0) {
            rank = adapter.rank;
        } else if (adapter.rank != rank) {
            throw DimensionError("adapter set: mixed ranks across slots");
        }
    }
}

std::size_t set_rank(const AdapterSet& set) {
    if (set.entries.empty()) {
        throw ArgumentError("adapter set is empty");
    }
    return set.entries.begin()->second.rank;
}

LoraAdapter new_adapter(std::size_t m, std::size_t n, std::size_t rank, double alpha,
                        std::uint64_t seed, std::string name) {
    if (m < 1 || n < 1 || rank < 1) {
        throw DimensionError("new_adapter: dimensions must be >= 1");
    }
    if (rank > std::min(m, n)) {
        throw DimensionError("new_adapter: rank exceeds min(m, n)");
    }
    LoraAdapter adapter;
    adapter.name = std::move(name);
    adapter.rank = rank;
    adapter.alpha = alpha;
    adapter.a_factor = WeightMatrix(m, rank);
    adapter.b_factor = WeightMatrix(rank, n);

    std::mt19937_64 rng(seed);
    const double stddev = 1.0 / static_cast<double>(rank);
    for (double& v : adapter.a_factor.data) {
        v = stddev * gaussian(rng);
    }
    check_adapter(adapter);
    return adapter;
}

WeightMatrix delta(const LoraAdapter& adapter) {
    check_adapter(adapter);
    const double s = adapter.alpha / static_cast<double>(adapter.rank);
    WeightMatrix out = scale(matmul(adapter.a_factor, adapter.b_factor), s);
    if (!out.all_finite()) {
        throw NumericError("delta: non-finite result for adapter '" + adapter.name + "'");
    }
    return out;
}

WeightMatrix merge(const WeightMatrix& base, const LoraAdapter& adapter) {
    if (base.rows != adapter.out_rows() || base.cols != adapter.out_cols()) {
        throw DimensionError("merge: base shape does not match adapter delta shape");
    }
    return add(base, delta(adapter));
}

}  // namespace fedxlat
