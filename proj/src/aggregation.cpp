// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fedxlat {

const char* to_string(AggregationMethod method) {
    return method == AggregationMethod::FedAvg ? "fedavg" : "flora";
}

AggregationMethod aggregation_method_from_string(const std::string& name) {
    if (name == "fedavg") return AggregationMethod::FedAvg;
    if (name == "flora") return AggregationMethod::FLoRA;
    throw ArgumentError("unknown aggregation method '" + name + "'");
}

namespace {

std::vector<double> resolve_weights(const AggregationConfig& config, std::size_t k,
                                    AggregationMethod method) {
    if (k == 0) {
        throw ArgumentError("aggregation: empty adapter list");
    }
    if (config.client_count != 0 && config.client_count != k) {
        throw AggregationError("aggregation: adapter count does not match configured k");
    }
    if (!config.client_weights) {
        const double w = method == AggregationMethod::FedAvg ? 1.0 / static_cast<double>(k) : 1.0;
        return std::vector<double>(k, w);
    }
    const auto& weights = *config.client_weights;
    if (weights.size() != k) {
        throw AggregationError("aggregation: weight list length does not match client count");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw AggregationError("aggregation: weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw AggregationError("aggregation: weights must sum to 1");
    }
    return weights;
}

// Canonical accumulation order: sort client indices by adapter content so a
// permuted client list folds in the same order bit for bit.
std::vector<std::size_t> canonical_order(const std::vector<LoraAdapter>& adapters) {
    std::vector<std::size_t> order(adapters.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
        const LoraAdapter& a = adapters[lhs];
        const LoraAdapter& b = adapters[rhs];
        if (a.name != b.name) return a.name < b.name;
        if (a.a_factor.data != b.a_factor.data) return a.a_factor.data < b.a_factor.data;
        return a.b_factor.data < b.b_factor.data;
    });
    return order;
}

}  // namespace

LoraAdapter fedavg(const std::vector<LoraAdapter>& adapters, const AggregationConfig& config) {
    const std::vector<double> weights =
        resolve_weights(config, adapters.size(), AggregationMethod::FedAvg);

    const LoraAdapter& first = adapters.front();
    for (const LoraAdapter& adapter : adapters) {
        check_adapter(adapter);
        if (adapter.out_rows() != first.out_rows() || adapter.out_cols() != first.out_cols()) {
            throw AggregationError("fedavg: adapter '" + adapter.name + "' has a mismatched shape");
        }
        if (adapter.rank != first.rank) {
            throw AggregationError("fedavg: adapter '" + adapter.name +
                                   "' has a mismatched rank (FedAvg needs equal ranks)");
        }
        if (adapter.alpha != first.alpha) {
            throw AggregationError("fedavg: adapter '" + adapter.name + "' has a mismatched alpha");
        }
    }

    // Identical clients average to the shared value; returning it directly keeps
    // idempotence exact instead of within rounding of the 1/k accumulation.
    const bool all_identical =
        std::all_of(adapters.begin(), adapters.end(), [&](const LoraAdapter& adapter) {
            return adapter.a_factor == first.a_factor && adapter.b_factor == first.b_factor;
        });
    if (all_identical) {
        return first;
    }

    LoraAdapter out;
    out.name = first.name;
    out.rank = first.rank;
    out.alpha = first.alpha;
    out.a_factor = WeightMatrix(first.a_factor.rows, first.a_factor.cols);
    out.b_factor = WeightMatrix(first.b_factor.rows, first.b_factor.cols);
    for (std::size_t idx : canonical_order(adapters)) {
        const LoraAdapter& adapter = adapters[idx];
        const double w = weights[idx];
        for (std::size_t i = 0; i < out.a_factor.data.size(); ++i) {
            out.a_factor.data[i] += w * adapter.a_factor.data[i];
        }
        for (std::size_t i = 0; i < out.b_factor.data.size(); ++i) {
            out.b_factor.data[i] += w * adapter.b_factor.data[i];
        }
    }
    check_adapter(out);
    return out;
}

LoraAdapter flora_stack(const std::vector<LoraAdapter>& adapters, const AggregationConfig& config) {
    const std::vector<double> weights =
        resolve_weights(config, adapters.size(), AggregationMethod::FLoRA);

    const LoraAdapter& first = adapters.front();
    const std::size_t m = first.out_rows();
    const std::size_t n = first.out_cols();
    std::size_t total_rank = 0;
    for (const LoraAdapter& adapter : adapters) {
        check_adapter(adapter);
        if (adapter.out_rows() != m || adapter.out_cols() != n) {
            throw AggregationError("flora_stack: adapter '" + adapter.name +
                                   "' has a mismatched shape");
        }
        if (adapter.alpha != first.alpha) {
            throw AggregationError("flora_stack: adapter '" + adapter.name +
                                   "' has a mismatched alpha");
        }
        if (adapter.rank > std::min(m, n)) {
            throw AggregationError("flora_stack: adapter '" + adapter.name +
                                   "' already exceeds a single client's rank bound");
        }
        total_rank += adapter.rank;
    }

    LoraAdapter out;
    out.name = first.name;
    out.rank = total_rank;
    // The stacked adapter's alpha grows with its rank so alpha/rank stays at the
    // first client's ratio; equal-rank stacking then copies the weighted blocks
    // verbatim, and a mixed-rank block picks up rank_0/rank_i so its delta keeps
    // the client's own alpha/rank_i scale.
    out.alpha = first.alpha * static_cast<double>(total_rank) / static_cast<double>(first.rank);
    out.a_factor = WeightMatrix(m, total_rank);
    out.b_factor = WeightMatrix(total_rank, n);

    std::size_t rank_offset = 0;
    for (std::size_t idx = 0; idx < adapters.size(); ++idx) {
        const LoraAdapter& adapter = adapters[idx];
        const double rescale = weights[idx] * static_cast<double>(first.rank) /
                               static_cast<double>(adapter.rank);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < adapter.rank; ++c) {
                out.a_factor.at(r, rank_offset + c) = rescale * adapter.a_factor.at(r, c);
            }
        }
        for (std::size_t r = 0; r < adapter.rank; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                out.b_factor.at(rank_offset + r, c) = adapter.b_factor.at(r, c);
            }
        }
        rank_offset += adapter.rank;
    }
    check_adapter(out);
    return out;
}

WeightMatrix aggregate_delta(const std::vector<LoraAdapter>& adapters,
                             const AggregationConfig& config) {
    if (config.method == AggregationMethod::FedAvg) {
        return delta(fedavg(adapters, config));
    }
    return delta(flora_stack(adapters, config));
}

AdapterSet aggregate_set(const std::vector<AdapterSet>& sets, const AggregationConfig& config) {
    if (sets.empty()) {
        throw ArgumentError("aggregate_set: empty set list");
    }
    for (const AdapterSet& set : sets) {
        check_adapter_set(set);
        if (set.entries.size() != sets.front().entries.size()) {
            throw AggregationError("aggregate_set: slot count differs between clients");
        }
    }
    AdapterSet out;
    for (const auto& [slot, unused] : sets.front().entries) {
        (void)unused;
        std::vector<LoraAdapter> per_slot;
        per_slot.reserve(sets.size());
        for (const AdapterSet& set : sets) {
            auto it = set.entries.find(slot);
            if (it == set.entries.end()) {
                throw AggregationError("aggregate_set: slot '" + slot +
                                       "' missing from one client");
            }
            per_slot.push_back(it->second);
        }
        LoraAdapter combined = config.method == AggregationMethod::FedAvg
                                   ? fedavg(per_slot, config)
                                   : flora_stack(per_slot, config);
        out.entries.emplace(slot, std::move(combined));
    }
    check_adapter_set(out);
    return out;
}

}  // namespace fedxlat
