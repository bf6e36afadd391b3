// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedxlat/adapters.hpp"
#include "fedxlat/errors.hpp"
#include "fedxlat/matrix.hpp"

namespace fedxlat {

// Slot name of the single adapted weight in the toy model.
inline constexpr const char* kToySlot = "proj";

// Token-to-token linear logit map: logits(position) = base_weight row of the
// source token, plus the adapter delta row. The base is frozen; only adapter
// factors train.
struct ToyModel {
    std::size_t vocab_size = 0;
    WeightMatrix base_weight;  // vocab_size x vocab_size

    ToyModel() = default;
    ToyModel(std::size_t vocab, WeightMatrix base);
};

// Zero-base model: uniform logits everywhere until an adapter learns.
ToyModel make_toy_model(std::size_t vocab_size);

struct TrainConfig {
    double learning_rate = 2e-4;
    double dropout = 0.5;  // whole-path Bernoulli drop per example, inverted scaling
    double max_grad_norm = 0.3;
    std::size_t epochs_per_round = 1;
    std::size_t batch_size = 8;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::uint64_t seed = 0;
};

void check_train_config(const TrainConfig& config);

// One training/evaluation sequence: position-aligned source and target ids.
struct TokenPairExample {
    std::vector<std::size_t> source;
    std::vector<std::size_t> target;

    bool operator==(const TokenPairExample&) const = default;
};

// Synthetic translation task: a fixed token permutation is the ground truth;
// each client only ever sees sources drawn from its own disjoint token
// subset.
struct SyntheticTaskSpec {
    std::size_t vocab_size = 64;
    std::vector<std::size_t> mapping;  // permutation over [0, vocab_size)
    std::vector<std::vector<std::size_t>> client_token_subsets;
    std::size_t sequence_length = 16;
    std::size_t samples_per_client = 500;
};

void check_task_spec(const SyntheticTaskSpec& spec);

// Builds a task with a seeded fixed-point-free permutation and disjoint
// client subsets of subset_size tokens each.
SyntheticTaskSpec make_disjoint_task(std::size_t vocab_size, std::size_t clients,
                                     std::size_t subset_size, std::size_t sequence_length,
                                     std::size_t samples_per_client, std::uint64_t seed);

// samples_per_client sequences with sources drawn from the client's subset.
std::vector<TokenPairExample> synthetic_training_data(const SyntheticTaskSpec& spec,
                                                      std::size_t client_index,
                                                      std::uint64_t seed);

// Test sequences drawn from the union of all client subsets.
std::vector<TokenPairExample> synthetic_test_data(const SyntheticTaskSpec& spec,
                                                  std::size_t samples, std::uint64_t seed);

// Logits for every position, shape len x vocab_size; dropout off.
WeightMatrix forward(const ToyModel& model, const LoraAdapter& adapter,
                     const std::vector<std::size_t>& tokens);
WeightMatrix forward(const ToyModel& model, const std::vector<std::size_t>& tokens);

// Mean softmax cross-entropy per position over the whole dataset; dropout off.
double batch_loss(const ToyModel& model, const LoraAdapter& adapter,
                  const std::vector<TokenPairExample>& examples);

struct GradientPair {
    WeightMatrix a_grad;
    WeightMatrix b_grad;
};

// Analytic gradients of batch_loss with respect to the adapter factors.
GradientPair gradients(const ToyModel& model, const LoraAdapter& adapter,
                       const std::vector<TokenPairExample>& examples);

// Scales both gradients so their joint Frobenius norm is at most max_norm.
// Returns the pre-clip norm.
double clip_gradients(GradientPair& grads, double max_norm);

// Adam on softmax cross-entropy over the dataset; only adapter factors move.
// Per-example whole-path dropout on the adapter contribution; global gradient
// norm clipped per batch; fresh optimizer state per call; deterministic for a
// fixed config seed.
LoraAdapter train_local(const ToyModel& model, const LoraAdapter& adapter,
                        const std::vector<TokenPairExample>& examples,
                        const TrainConfig& config);

// Max relative error between analytic and central finite-difference gradients
// (h = 1e-5) over every adapter entry. Intended for small instances.
double grad_check(const ToyModel& model, const LoraAdapter& adapter,
                  const std::vector<TokenPairExample>& examples);

// Per-position argmax decode; ties break to the lowest token id.
std::vector<std::size_t> translate(const ToyModel& model, const LoraAdapter& adapter,
                                   const std::vector<std::size_t>& source);
std::vector<std::size_t> translate(const ToyModel& model, const std::vector<std::size_t>& source);

// Fraction of positions where the decoded token equals the target.
double token_accuracy(const ToyModel& model, const LoraAdapter& adapter,
                      const std::vector<TokenPairExample>& examples);
double token_accuracy(const ToyModel& model, const std::vector<TokenPairExample>& examples);

}  // namespace fedxlat
