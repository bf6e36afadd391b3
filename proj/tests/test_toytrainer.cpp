// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "fedxlat/rng.hpp"
#include "fedxlat/toytrainer.hpp"

#include "doctest.h"

using fedxlat::LoraAdapter;
using fedxlat::SyntheticTaskSpec;
using fedxlat::TokenPairExample;
using fedxlat::ToyModel;
using fedxlat::TrainConfig;
using fedxlat::WeightMatrix;

namespace {

LoraAdapter trained_adapter(std::mt19937_64& rng, std::size_t vocab, std::size_t rank) {
    LoraAdapter adapter = fedxlat::new_adapter(vocab, vocab, rank, 16.0, rng(), fedxlat::kToySlot);
    for (double& v : adapter.b_factor.data) v = 0.1 * fedxlat::gaussian(rng);
    return adapter;
}

std::vector<TokenPairExample> random_examples(std::mt19937_64& rng, std::size_t vocab,
                                              std::size_t count, std::size_t len) {
    std::vector<TokenPairExample> examples(count);
    for (TokenPairExample& ex : examples) {
        ex.source.resize(len);
        ex.target.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            ex.source[i] = fedxlat::uniform_below(rng, vocab);
            ex.target[i] = fedxlat::uniform_below(rng, vocab);
        }
    }
    return examples;
}

}  // namespace

TEST_SUITE("toytrainer") {

TEST_CASE("zero model: uniform logits give loss ln(V) and argmax token 0") {
    const ToyModel model = fedxlat::make_toy_model(8);
    std::mt19937_64 rng(61);
    const auto examples = random_examples(rng, 8, 4, 5);
    CHECK(fedxlat::batch_loss(model, fedxlat::new_adapter(8, 8, 2, 16.0, 1, fedxlat::kToySlot),
                              examples) == doctest::Approx(std::log(8.0)).epsilon(1e-10));

    // All logits tie at zero, so every position decodes to token 0.
    const auto decoded = fedxlat::translate(model, {3, 5, 7});
    CHECK((decoded == std::vector<std::size_t>{0, 0, 0}));
}

TEST_CASE("forward with an adapter equals forward on the merged base") {
    std::mt19937_64 rng(62);
    const std::size_t vocab = 12;
    ToyModel model = fedxlat::make_toy_model(vocab);
    for (double& v : model.base_weight.data) v = fedxlat::gaussian(rng);
    const LoraAdapter adapter = trained_adapter(rng, vocab, 3);

    ToyModel merged = model;
    merged.base_weight = fedxlat::merge(model.base_weight, adapter);

    const std::vector<std::size_t> tokens{0, 4, 11, 4};
    const WeightMatrix with_adapter = fedxlat::forward(model, adapter, tokens);
    const WeightMatrix on_merged = fedxlat::forward(merged, tokens);
    CHECK(fedxlat::max_abs_diff(with_adapter, on_merged) < 1e-9);
}

TEST_CASE("a dominant base diagonal decodes the identity map") {
    const std::size_t vocab = 6;
    WeightMatrix base(vocab, vocab);
    for (std::size_t i = 0; i < vocab; ++i) base.at(i, i) = 10.0;
    const ToyModel model(vocab, base);
    const std::vector<std::size_t> source{2, 0, 5, 3};
    CHECK(fedxlat::translate(model, source) == source);
}

TEST_CASE("out-of-range tokens are rejected") {
    const ToyModel model = fedxlat::make_toy_model(4);
    CHECK_THROWS_AS(fedxlat::forward(model, {4}), fedxlat::ArgumentError);
    CHECK_THROWS_AS(fedxlat::translate(model, {9}), fedxlat::ArgumentError);
}

TEST_CASE("zero B factor kills the A gradient but not the B gradient") {
    std::mt19937_64 rng(63);
    const std::size_t vocab = 10;
    ToyModel model = fedxlat::make_toy_model(vocab);
    for (double& v : model.base_weight.data) v = 0.3 * fedxlat::gaussian(rng);
    const LoraAdapter fresh = fedxlat::new_adapter(vocab, vocab, 2, 16.0, 99, fedxlat::kToySlot);
    const auto examples = random_examples(rng, vocab, 3, 6);

    const fedxlat::GradientPair grads = fedxlat::gradients(model, fresh, examples);
    for (double g : grads.a_grad.data) CHECK(g == 0.0);
    double b_norm = 0.0;
    for (double g : grads.b_grad.data) b_norm += g * g;
    CHECK(b_norm > 0.0);
}

TEST_CASE("analytic gradients agree with finite differences") {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t vocab = 4 + fedxlat::uniform_below(rng, 12);  // <= 16
        const std::size_t rank = 1 + fedxlat::uniform_below(rng, 2);
        ToyModel model = fedxlat::make_toy_model(vocab);
        for (double& v : model.base_weight.data) v = 0.2 * fedxlat::gaussian(rng);
        const LoraAdapter adapter = trained_adapter(rng, vocab, rank);
        const auto examples = random_examples(rng, vocab, 2, 4);
        CHECK(fedxlat::grad_check(model, adapter, examples) < 1e-4);
    }
}

TEST_CASE("gradient clipping") {
    WeightMatrix a(2, 2, {3.0, 0.0, 0.0, 0.0});
    WeightMatrix b(2, 2, {0.0, 4.0, 0.0, 0.0});
    fedxlat::GradientPair grads{a, b};

    // Joint norm sqrt(9 + 16) = 5 exceeds 0.5: scaled by a factor of 10.
    const double pre = fedxlat::clip_gradients(grads, 0.5);
    CHECK(pre == doctest::Approx(5.0).epsilon(1e-15));
    double post = 0.0;
    for (double g : grads.a_grad.data) post += g * g;
    for (double g : grads.b_grad.data) post += g * g;
    CHECK(std::sqrt(post) <= 0.5 + 1e-12);
    CHECK(grads.a_grad.at(0, 0) == doctest::Approx(0.3).epsilon(1e-12));

    // Under the bound the gradients are untouched, bit for bit.
    fedxlat::GradientPair small{WeightMatrix(1, 1, {0.1}), WeightMatrix(1, 1, {0.2})};
    const fedxlat::GradientPair before = small;
    fedxlat::clip_gradients(small, 10.0);
    CHECK(small.a_grad == before.a_grad);
    CHECK(small.b_grad == before.b_grad);
}

TEST_CASE("train_local with zero learning rate is a bitwise no-op") {
    std::mt19937_64 rng(65);
    const std::size_t vocab = 8;
    const ToyModel model = fedxlat::make_toy_model(vocab);
    const LoraAdapter adapter = trained_adapter(rng, vocab, 2);
    const auto examples = random_examples(rng, vocab, 6, 4);

    TrainConfig config;
    config.learning_rate = 0.0;
    config.seed = 5;
    const LoraAdapter after = fedxlat::train_local(model, adapter, examples, config);
    CHECK(after.a_factor == adapter.a_factor);
    CHECK(after.b_factor == adapter.b_factor);
}

TEST_CASE("train_local is deterministic in the config seed") {
    std::mt19937_64 rng(66);
    const std::size_t vocab = 8;
    const ToyModel model = fedxlat::make_toy_model(vocab);
    const LoraAdapter adapter = trained_adapter(rng, vocab, 2);
    const auto examples = random_examples(rng, vocab, 6, 4);

    TrainConfig config;
    config.learning_rate = 0.01;
    config.seed = 17;
    const LoraAdapter first = fedxlat::train_local(model, adapter, examples, config);
    const LoraAdapter second = fedxlat::train_local(model, adapter, examples, config);
    CHECK(first.a_factor == second.a_factor);
    CHECK(first.b_factor == second.b_factor);

    config.seed = 18;  // a different dropout stream moves the result
    const LoraAdapter third = fedxlat::train_local(model, adapter, examples, config);
    CHECK(first.a_factor != third.a_factor);
}

TEST_CASE("train_local rejects empty datasets and bad configs") {
    const ToyModel model = fedxlat::make_toy_model(4);
    const LoraAdapter adapter = fedxlat::new_adapter(4, 4, 1, 16.0, 1, fedxlat::kToySlot);
    TrainConfig config;
    CHECK_THROWS_AS(fedxlat::train_local(model, adapter, {}, config), fedxlat::ArgumentError);

    TrainConfig negative_lr;
    negative_lr.learning_rate = -1.0;
    CHECK_THROWS_AS(fedxlat::check_train_config(negative_lr), fedxlat::ArgumentError);
    TrainConfig bad_dropout;
    bad_dropout.dropout = 1.0;
    CHECK_THROWS_AS(fedxlat::check_train_config(bad_dropout), fedxlat::ArgumentError);
    TrainConfig zero_batch;
    zero_batch.batch_size = 0;
    CHECK_THROWS_AS(fedxlat::check_train_config(zero_batch), fedxlat::ArgumentError);
    CHECK_NOTHROW(fedxlat::check_train_config(TrainConfig{}));
}

TEST_CASE("training learns a small mapping") {
    // 200 optimizer steps on a 10-token permutation task reach (near-)perfect
    // training accuracy.
    const std::size_t vocab = 10;
    SyntheticTaskSpec spec = fedxlat::make_disjoint_task(vocab, 1, vocab, 6, 10, 303);
    const auto data = fedxlat::synthetic_training_data(spec, 0, 304);

    const ToyModel model = fedxlat::make_toy_model(vocab);
    LoraAdapter adapter = fedxlat::new_adapter(vocab, vocab, 4, 16.0, 305, fedxlat::kToySlot);

    TrainConfig config;
    config.learning_rate = 0.05;
    config.dropout = 0.0;
    config.max_grad_norm = 1.0;
    config.batch_size = 5;       // 2 steps per epoch
    config.epochs_per_round = 100;
    config.seed = 306;

    const double before = fedxlat::token_accuracy(model, adapter, data);
    adapter = fedxlat::train_local(model, adapter, data, config);
    const double after = fedxlat::token_accuracy(model, adapter, data);
    CHECK(after > before);
    CHECK(after >= 0.99);
    CHECK(fedxlat::batch_loss(model, adapter, data) < 0.5);
}

TEST_CASE("disjoint task construction") {
    const SyntheticTaskSpec spec = fedxlat::make_disjoint_task(32, 3, 8, 5, 20, 77);
    CHECK(spec.vocab_size == 32);
    REQUIRE(spec.mapping.size() == 32);
    REQUIRE(spec.client_token_subsets.size() == 3);
    CHECK(spec.sequence_length == 5);
    CHECK(spec.samples_per_client == 20);
    CHECK_NOTHROW(fedxlat::check_task_spec(spec));

    // The mapping is a fixed-point-free permutation.
    std::set<std::size_t> image(spec.mapping.begin(), spec.mapping.end());
    CHECK(image.size() == 32);
    for (std::size_t t = 0; t < 32; ++t) {
        CHECK(spec.mapping[t] != t);
        CHECK(spec.mapping[t] < 32);
    }

    // Subsets are disjoint and of the requested size.
    std::set<std::size_t> all_tokens;
    for (const auto& subset : spec.client_token_subsets) {
        CHECK(subset.size() == 8);
        for (std::size_t t : subset) {
            CHECK(t < 32);
            CHECK(all_tokens.insert(t).second);
        }
    }

    // Same seed, same task.
    const SyntheticTaskSpec again = fedxlat::make_disjoint_task(32, 3, 8, 5, 20, 77);
    CHECK(again.mapping == spec.mapping);
    CHECK(again.client_token_subsets == spec.client_token_subsets);
}

TEST_CASE("synthetic data stays inside the client subset and follows the mapping") {
    const SyntheticTaskSpec spec = fedxlat::make_disjoint_task(32, 2, 10, 7, 15, 78);
    for (std::size_t client = 0; client < 2; ++client) {
        const auto data = fedxlat::synthetic_training_data(spec, client, 79);
        CHECK(data.size() == 15);
        const std::set<std::size_t> subset(spec.client_token_subsets[client].begin(),
                                           spec.client_token_subsets[client].end());
        for (const TokenPairExample& ex : data) {
            CHECK(ex.source.size() == 7);
            REQUIRE(ex.target.size() == 7);
            for (std::size_t i = 0; i < ex.source.size(); ++i) {
                CHECK(subset.count(ex.source[i]) == 1);
                CHECK(ex.target[i] == spec.mapping[ex.source[i]]);
            }
        }
    }

    // Test data draws from the union of subsets.
    std::set<std::size_t> united;
    for (const auto& subset : spec.client_token_subsets) {
        united.insert(subset.begin(), subset.end());
    }
    const auto test_data = fedxlat::synthetic_test_data(spec, 25, 80);
    CHECK(test_data.size() == 25);
    for (const TokenPairExample& ex : test_data) {
        for (std::size_t i = 0; i < ex.source.size(); ++i) {
            CHECK(united.count(ex.source[i]) == 1);
            CHECK(ex.target[i] == spec.mapping[ex.source[i]]);
        }
    }

    CHECK_THROWS_AS(fedxlat::synthetic_training_data(spec, 5, 0), fedxlat::ArgumentError);
}

TEST_CASE("token accuracy counts matching positions") {
    const std::size_t vocab = 4;
    WeightMatrix base(vocab, vocab);
    for (std::size_t i = 0; i < vocab; ++i) base.at(i, i) = 5.0;
    const ToyModel model(vocab, base);

    std::vector<TokenPairExample> examples(1);
    examples[0].source = {0, 1, 2, 3};
    examples[0].target = {0, 1, 0, 0};  // identity decode hits positions 0 and 1
    CHECK(fedxlat::token_accuracy(model, examples) == 0.5);
}

}  // TEST_SUITE
