// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "fedxlat/adapters.hpp"

namespace fedxlat {

enum class AggregationMethod { FedAvg, FLoRA };

const char* to_string(AggregationMethod method);
AggregationMethod aggregation_method_from_string(const std::string& name);

/// Server-side combination settings. When client_weights is absent, FedAvg
/// uses uniform 1/k and FLoRA uses all-ones (the unweighted stacked sum).
/// When present, weights must be non-negative, length k, and sum to 1
/// within 1e-9.
struct AggregationConfig {
    AggregationMethod method = AggregationMethod::FedAvg;
    std::size_t client_count = 0;
    std::optional<std::vector<double>> client_weights;
};

/// Entrywise weighted mean of the A factors and of the B factors. All inputs
/// must share shape, rank, and alpha. Accumulation runs over a canonical
/// content ordering, so the result is bit-identical under any permutation of
/// the client list.
LoraAdapter fedavg(const std::vector<LoraAdapter>& adapters, const AggregationConfig& config);

/// Side-by-side concatenation of (weighted) A factors and top-to-bottom
/// concatenation of B factors. Output rank is the sum of input ranks, and
/// delta(output) equals the weighted sum of input deltas up to float
/// associativity. Inputs must share (m, n) and alpha; ranks may differ.
LoraAdapter flora_stack(const std::vector<LoraAdapter>& adapters, const AggregationConfig& config);

/// delta() of the aggregated adapter under config.method.
WeightMatrix aggregate_delta(const std::vector<LoraAdapter>& adapters,
                             const AggregationConfig& config);

/// Slot-wise aggregation across whole client sets. Every set must hold the
/// same slot names.
AdapterSet aggregate_set(const std::vector<AdapterSet>& sets, const AggregationConfig& config);

}  // namespace fedxlat
