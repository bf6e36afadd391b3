// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fedxlat/adapters.hpp"
#include "fedxlat/aggregation.hpp"
#include "fedxlat/errors.hpp"
#include "fedxlat/metrics.hpp"
#include "fedxlat/toytrainer.hpp"

namespace fedxlat {

// Stacked aggregates grow the adapter rank, so after every aggregation the
// stacked delta is folded into the effective base weights and clients restart
// from fresh zero-delta rank-r adapters.
enum class FloraPolicy {
    MergeAndReinit,
};

enum class RejectReason {
    Missing,
    Shape,
    Rank,
    NonFinite,
    Norm,
    Unexpected,
};

const char* to_string(RejectReason reason);

struct Rejection {
    std::string slot;
    RejectReason reason = RejectReason::Missing;
    std::string detail;
};

// Expected submission layout, fixed at setup time.
struct ShapeManifest {
    std::map<std::string, std::pair<std::size_t, std::size_t>> slots;  // name -> (rows, cols)
    std::size_t rank = 0;
    double alpha = 16.0;
    double norm_bound = 1e6;  // Frobenius cap per factor
};

// Accepts iff every manifest slot is present with matching shape and rank, no
// extra slots appear, every entry is finite, and each factor's Frobenius norm
// stays within the bound. Returns the first rejection found, or nothing.
std::optional<Rejection> validate_submission(const AdapterSet& set, const ShapeManifest& manifest);

struct FederationConfig {
    std::size_t rounds = 20;
    AggregationConfig aggregation;
    std::size_t client_count = 2;
    std::uint64_t seed = 0;
    FloraPolicy flora_policy = FloraPolicy::MergeAndReinit;
    TrainConfig train;
    std::size_t rank = 8;
    double alpha = 16.0;
    double norm_bound = 1e6;
};

struct MetricSnapshot {
    MetricReport report;
    double token_accuracy = 0.0;
};

struct RoundRecord {
    std::size_t round_index = 0;  // 0 is the untrained baseline evaluation
    AggregationMethod method = AggregationMethod::FedAvg;
    std::string aggregate_checksum;
    std::size_t aggregate_rank = 0;
    MetricSnapshot metrics;
    double wall_time = 0.0;  // informational only; never persisted
};

struct FederationState {
    ToyModel model;               // frozen base
    WeightMatrix effective_base;  // base plus folded stacked deltas
    AdapterSet shared;            // shared client starting point
    FederationConfig config;
    ShapeManifest manifest;
    std::vector<std::vector<TokenPairExample>> client_data;
    std::vector<TokenPairExample> test_set;
};

// Initializes shared zero-delta adapters and the submission manifest.
FederationState make_federation_state(ToyModel model, FederationConfig config,
                                      std::vector<std::vector<TokenPairExample>> client_data,
                                      std::vector<TokenPairExample> test_set);

// Test-set evaluation of the state's current merged model: token accuracy
// plus text metrics over greedy decodes.
MetricSnapshot evaluate_state(const FederationState& state);

// One federated round: every client trains locally from the shared starting
// point, submissions are validated and aggregated, and the merged model is
// evaluated. Throws PoisonedRoundError when a submission fails validation.
RoundRecord run_round(FederationState& state, std::size_t round_index);

// Same, with pre-built submissions (one AdapterSet per client, in client
// order). This is the entry the coordinator path shares.
RoundRecord run_round_with_submissions(FederationState& state, std::size_t round_index,
                                       const std::vector<AdapterSet>& submissions);

// Round 0 evaluation followed by config.rounds federated rounds; the result
// holds rounds + 1 records. Fully deterministic for fixed inputs and seed.
std::vector<RoundRecord> run_simulation(FederationState& state);

// Round with the most per-metric argmax wins across {bleu, meteor, rouge_l,
// codebleu, token_accuracy}; every tie breaks to the lower round index.
std::size_t select_best_round(const std::vector<RoundRecord>& records);

}  // namespace fedxlat
