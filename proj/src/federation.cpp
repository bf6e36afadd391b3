// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/federation.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fedxlat/flad.hpp"
#include "fedxlat/rng.hpp"

namespace fedxlat {

namespace {

double now_seconds() {
    const auto tp = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration<double>(tp).count();
}

std::string token_string(const std::vector<std::size_t>& tokens) {
    std::ostringstream out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out << ' ';
        out << 't' << tokens[i];
    }
    return out.str();
}

// Seed tags keep the per-round, per-client training streams and the FLoRA
// reinitialization streams disjoint.
constexpr std::uint64_t kRoundTag = 0x726f756e64;   // "round"
constexpr std::uint64_t kReinitTag = 0x7265696e69;  // "reini"

}  // namespace

const char* to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::Missing: return "missing";
        case RejectReason::Shape: return "shape";
        case RejectReason::Rank: return "rank";
        case RejectReason::NonFinite: return "non_finite";
        case RejectReason::Norm: return "norm";
        case RejectReason::Unexpected: return "unexpected";
    }
    return "unknown";
}

std::optional<Rejection> validate_submission(const AdapterSet& set, const ShapeManifest& manifest) {
    for (const auto& [name, shape] : manifest.slots) {
        const auto it = set.entries.find(name);
        if (it == set.entries.end()) {
            return Rejection{name, RejectReason::Missing, "slot absent from submission"};
        }
        const LoraAdapter& adapter = it->second;
        if (adapter.rank != manifest.rank) {
            std::ostringstream detail;
            detail << "rank " << adapter.rank << ", expected " << manifest.rank;
            return Rejection{name, RejectReason::Rank, detail.str()};
        }
        if (adapter.out_rows() != shape.first || adapter.out_cols() != shape.second) {
            std::ostringstream detail;
            detail << "shape " << adapter.out_rows() << "x" << adapter.out_cols() << ", expected "
                   << shape.first << "x" << shape.second;
            return Rejection{name, RejectReason::Shape, detail.str()};
        }
        if (!adapter.a_factor.all_finite() || !adapter.b_factor.all_finite()) {
            return Rejection{name, RejectReason::NonFinite, "factor holds a non-finite entry"};
        }
        const double a_norm = adapter.a_factor.frobenius_norm();
        const double b_norm = adapter.b_factor.frobenius_norm();
        if (a_norm > manifest.norm_bound || b_norm > manifest.norm_bound) {
            std::ostringstream detail;
            detail << "factor norm " << std::max(a_norm, b_norm) << " exceeds bound "
                   << manifest.norm_bound;
            return Rejection{name, RejectReason::Norm, detail.str()};
        }
    }
    for (const auto& [name, adapter] : set.entries) {
        (void)adapter;
        if (manifest.slots.find(name) == manifest.slots.end()) {
            return Rejection{name, RejectReason::Unexpected, "slot not in manifest"};
        }
    }
    return std::nullopt;
}

FederationState make_federation_state(ToyModel model, FederationConfig config,
                                      std::vector<std::vector<TokenPairExample>> client_data,
                                      std::vector<TokenPairExample> test_set) {
    if (config.client_count == 0) {
        throw ArgumentError("federation: client_count must be positive");
    }
    if (client_data.size() != config.client_count) {
        throw ArgumentError("federation: client_data size does not match client_count");
    }
    check_train_config(config.train);

    FederationState state;
    state.effective_base = model.base_weight;
    state.model = std::move(model);
    state.config = std::move(config);
    state.config.aggregation.client_count = state.config.client_count;
    state.client_data = std::move(client_data);
    state.test_set = std::move(test_set);

    const std::size_t vocab = state.model.vocab_size;
    LoraAdapter shared = new_adapter(vocab, vocab, state.config.rank, state.config.alpha,
                                     derive_seed(state.config.seed, kReinitTag), kToySlot);
    state.shared.entries.emplace(kToySlot, shared);

    state.manifest.slots.emplace(kToySlot, std::make_pair(vocab, vocab));
    state.manifest.rank = state.config.rank;
    state.manifest.alpha = state.config.alpha;
    state.manifest.norm_bound = state.config.norm_bound;
    return state;
}

MetricSnapshot evaluate_state(const FederationState& state) {
    const auto it = state.shared.entries.find(kToySlot);
    if (it == state.shared.entries.end()) {
        throw ArgumentError("federation: shared adapter set lacks the model slot");
    }
    ToyModel merged = state.model;
    merged.base_weight = state.effective_base;

    MetricSnapshot snapshot;
    snapshot.token_accuracy = token_accuracy(merged, it->second, state.test_set);

    std::vector<std::string> candidates;
    std::vector<std::string> references;
    candidates.reserve(state.test_set.size());
    references.reserve(state.test_set.size());
    for (const TokenPairExample& example : state.test_set) {
        candidates.push_back(token_string(translate(merged, it->second, example.source)));
        references.push_back(token_string(example.target));
    }
    snapshot.report = score_corpus(candidates, references, Language::Toy);
    return snapshot;
}

RoundRecord run_round(FederationState& state, std::size_t round_index) {
    std::vector<AdapterSet> submissions;
    submissions.reserve(state.config.client_count);
    const std::uint64_t round_seed =
        derive_seed(derive_seed(state.config.seed, kRoundTag), round_index);
    for (std::size_t client = 0; client < state.config.client_count; ++client) {
        const auto it = state.shared.entries.find(kToySlot);
        ToyModel merged = state.model;
        merged.base_weight = state.effective_base;
        TrainConfig train = state.config.train;
        train.seed = derive_seed(round_seed, client);
        LoraAdapter trained = train_local(merged, it->second, state.client_data[client], train);
        AdapterSet submission;
        submission.entries.emplace(kToySlot, std::move(trained));
        submissions.push_back(std::move(submission));
    }
    return run_round_with_submissions(state, round_index, submissions);
}

RoundRecord run_round_with_submissions(FederationState& state, std::size_t round_index,
                                       const std::vector<AdapterSet>& submissions) {
    const double started = now_seconds();
    if (submissions.size() != state.config.client_count) {
        throw ArgumentError("federation: submission count does not match client_count");
    }
    for (std::size_t client = 0; client < submissions.size(); ++client) {
        const auto rejection = validate_submission(submissions[client], state.manifest);
        if (rejection) {
            std::ostringstream message;
            message << "round " << round_index << ": client " << client << ": slot '"
                    << rejection->slot << "': " << to_string(rejection->reason) << " ("
                    << rejection->detail << ")";
            throw PoisonedRoundError(message.str());
        }
    }

    const AdapterSet aggregated = aggregate_set(submissions, state.config.aggregation);
    const std::string checksum = sha256_hex(encode_adapter_set(aggregated));
    const LoraAdapter& slot = aggregated.entries.at(kToySlot);

    RoundRecord record;
    record.round_index = round_index;
    record.method = state.config.aggregation.method;
    record.aggregate_checksum = checksum;
    record.aggregate_rank = slot.rank;

    if (state.config.aggregation.method == AggregationMethod::FedAvg) {
        state.shared = aggregated;
    } else {
        // Fold the stacked delta into the effective base, then hand every
        // client a fresh zero-delta adapter at the configured rank.
        state.effective_base = merge(state.effective_base, slot);
        const std::uint64_t reinit_seed =
            derive_seed(derive_seed(state.config.seed, kReinitTag), round_index);
        LoraAdapter fresh = new_adapter(state.model.vocab_size, state.model.vocab_size,
                                        state.config.rank, state.config.alpha, reinit_seed,
                                        kToySlot);
        state.shared.entries.clear();
        state.shared.entries.emplace(kToySlot, std::move(fresh));
    }

    record.metrics = evaluate_state(state);
    record.wall_time = now_seconds() - started;
    return record;
}

std::vector<RoundRecord> run_simulation(FederationState& state) {
    std::vector<RoundRecord> records;
    records.reserve(state.config.rounds + 1);

    const double started = now_seconds();
    RoundRecord baseline;
    baseline.round_index = 0;
    baseline.method = state.config.aggregation.method;
    baseline.aggregate_checksum = sha256_hex(encode_adapter_set(state.shared));
    baseline.aggregate_rank = state.config.rank;
    baseline.metrics = evaluate_state(state);
    baseline.wall_time = now_seconds() - started;
    records.push_back(std::move(baseline));

    for (std::size_t round = 1; round <= state.config.rounds; ++round) {
        records.push_back(run_round(state, round));
    }
    return records;
}

std::size_t select_best_round(const std::vector<RoundRecord>& records) {
    if (records.empty()) {
        throw ArgumentError("federation: cannot select a best round from no records");
    }
    const auto column = [](const RoundRecord& record, std::size_t metric) {
        switch (metric) {
            case 0: return record.metrics.report.bleu;
            case 1: return record.metrics.report.meteor;
            case 2: return record.metrics.report.rouge_l;
            case 3: return record.metrics.report.codebleu;
            default: return record.metrics.token_accuracy;
        }
    };
    std::vector<std::size_t> wins(records.size(), 0);
    for (std::size_t metric = 0; metric < 5; ++metric) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (column(records[i], metric) > column(records[best], metric)) best = i;
        }
        ++wins[best];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (wins[i] > wins[best]) best = i;
    }
    return records[best].round_index;
}

}  // namespace fedxlat
