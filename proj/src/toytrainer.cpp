// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/toytrainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fedxlat/rng.hpp"

namespace fedxlat {

ToyModel::ToyModel(std::size_t vocab, WeightMatrix base) : vocab_size(vocab), base_weight(std::move(base)) {
    if (vocab_size == 0) {
        throw ArgumentError("toy model: vocabulary must be non-empty");
    }
    if (base_weight.rows != vocab_size || base_weight.cols != vocab_size) {
        throw DimensionError("toy model: base weight must be vocab x vocab");
    }
    if (!base_weight.all_finite()) {
        throw NumericError("toy model: base weight has non-finite entries");
    }
}

ToyModel make_toy_model(std::size_t vocab_size) {
    return ToyModel(vocab_size, WeightMatrix(vocab_size, vocab_size));
}

void check_train_config(const TrainConfig& config) {
    // Zero is allowed so a no-op training pass stays expressible.
    if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
        throw ArgumentError("train config: learning rate must be non-negative");
    }
    if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
        throw ArgumentError("train config: dropout must lie in [0, 1)");
    }
    if (!(config.max_grad_norm > 0.0)) {
        throw ArgumentError("train config: max_grad_norm must be positive");
    }
    if (config.epochs_per_round == 0 || config.batch_size == 0) {
        throw ArgumentError("train config: epochs and batch size must be positive");
    }
}

void check_task_spec(const SyntheticTaskSpec& spec) {
    if (spec.vocab_size == 0 || spec.sequence_length == 0 || spec.samples_per_client == 0) {
        throw ArgumentError("task spec: sizes must be positive");
    }
    if (spec.mapping.size() != spec.vocab_size) {
        throw ArgumentError("task spec: mapping must cover the vocabulary");
    }
    std::vector<bool> hit(spec.vocab_size, false);
    for (std::size_t image : spec.mapping) {
        if (image >= spec.vocab_size || hit[image]) {
            throw ArgumentError("task spec: mapping is not a permutation");
        }
        hit[image] = true;
    }
    std::vector<bool> taken(spec.vocab_size, false);
    for (const auto& subset : spec.client_token_subsets) {
        if (subset.empty()) {
            throw ArgumentError("task spec: empty client token subset");
        }
        for (std::size_t token : subset) {
            if (token >= spec.vocab_size) {
                throw ArgumentError("task spec: subset token out of range");
            }
            if (taken[token]) {
                throw ArgumentError("task spec: client token subsets overlap");
            }
            taken[token] = true;
        }
    }
}

SyntheticTaskSpec make_disjoint_task(std::size_t vocab_size, std::size_t clients,
                                     std::size_t subset_size, std::size_t sequence_length,
                                     std::size_t samples_per_client, std::uint64_t seed) {
    if (clients == 0 || subset_size == 0 || clients * subset_size > vocab_size) {
        throw ArgumentError("task spec: client subsets do not fit the vocabulary");
    }
    SyntheticTaskSpec spec;
    spec.vocab_size = vocab_size;
    spec.sequence_length = sequence_length;
    spec.samples_per_client = samples_per_client;

    std::mt19937_64 rng(derive_seed(seed, 0x7461736bULL));  // task stream
    spec.mapping.resize(vocab_size);
    std::iota(spec.mapping.begin(), spec.mapping.end(), 0);
    shuffle_values(spec.mapping, rng);
    // Remove fixed points so an untrained model gets nothing for free.
    for (std::size_t i = 0; i < vocab_size; ++i) {
        if (spec.mapping[i] == i) {
            std::swap(spec.mapping[i], spec.mapping[(i + 1) % vocab_size]);
        }
    }

    std::vector<std::size_t> tokens(vocab_size);
    std::iota(tokens.begin(), tokens.end(), 0);
    shuffle_values(tokens, rng);
    spec.client_token_subsets.resize(clients);
    for (std::size_t c = 0; c < clients; ++c) {
        spec.client_token_subsets[c].assign(tokens.begin() + c * subset_size,
                                            tokens.begin() + (c + 1) * subset_size);
        std::sort(spec.client_token_subsets[c].begin(), spec.client_token_subsets[c].end());
    }
    check_task_spec(spec);
    return spec;
}

namespace {

std::vector<TokenPairExample> sample_sequences(const SyntheticTaskSpec& spec,
                                               const std::vector<std::size_t>& pool,
                                               std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TokenPairExample> examples(samples);
    for (TokenPairExample& example : examples) {
        example.source.resize(spec.sequence_length);
        example.target.resize(spec.sequence_length);
        for (std::size_t pos = 0; pos < spec.sequence_length; ++pos) {
            const std::size_t token = pool[uniform_below(rng, pool.size())];
            example.source[pos] = token;
            example.target[pos] = spec.mapping[token];
        }
    }
    return examples;
}

}  // namespace

std::vector<TokenPairExample> synthetic_training_data(const SyntheticTaskSpec& spec,
                                                      std::size_t client_index,
                                                      std::uint64_t seed) {
    check_task_spec(spec);
    if (client_index >= spec.client_token_subsets.size()) {
        throw ArgumentError("synthetic data: client index out of range");
    }
    return sample_sequences(spec, spec.client_token_subsets[client_index],
                            spec.samples_per_client,
                            derive_seed(seed, 0x636c69ULL + client_index));
}

std::vector<TokenPairExample> synthetic_test_data(const SyntheticTaskSpec& spec,
                                                  std::size_t samples, std::uint64_t seed) {
    check_task_spec(spec);
    std::vector<std::size_t> pool;
    for (const auto& subset : spec.client_token_subsets) {
        pool.insert(pool.end(), subset.begin(), subset.end());
    }
    std::sort(pool.begin(), pool.end());
    return sample_sequences(spec, pool, samples, derive_seed(seed, 0x74657374ULL));
}

namespace {

void check_tokens(const std::vector<std::size_t>& tokens, std::size_t vocab) {
    for (std::size_t token : tokens) {
        if (token >= vocab) {
            throw ArgumentError("toy model: token id " + std::to_string(token) +
                                " outside vocabulary of " + std::to_string(vocab));
        }
    }
}

void check_adapter_fits(const ToyModel& model, const LoraAdapter& adapter) {
    check_adapter(adapter);
    if (adapter.out_rows() != model.vocab_size || adapter.out_cols() != model.vocab_size) {
        throw DimensionError("toy model: adapter shape does not match vocabulary");
    }
}

// Logits of one source token: base row s plus path_scale * A[s,:] * B.
void logits_row(const WeightMatrix& base, const LoraAdapter& adapter, double path_scale,
                std::size_t s, std::vector<double>& out) {
    const std::size_t v = base.cols;
    out.assign(base.data.begin() + s * v, base.data.begin() + (s + 1) * v);
    if (path_scale == 0.0) return;
    const std::size_t rank = adapter.rank;
    for (std::size_t r = 0; r < rank; ++r) {
        const double a_sr = path_scale * adapter.a_factor.at(s, r);
        if (a_sr == 0.0) continue;
        const double* b_row = &adapter.b_factor.data[r * v];
        for (std::size_t j = 0; j < v; ++j) {
            out[j] += a_sr * b_row[j];
        }
    }
}

// In place: logits -> softmax probabilities; returns log-sum-exp for the loss.
double softmax_inplace(std::vector<double>& z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return zmax + std::log(sum);
}

std::size_t total_positions(const std::vector<TokenPairExample>& examples) {
    std::size_t total = 0;
    for (const TokenPairExample& example : examples) {
        if (example.source.size() != example.target.size()) {
            throw ArgumentError("toy model: source and target lengths differ");
        }
        total += example.source.size();
    }
    return total;
}

}  // namespace

WeightMatrix forward(const ToyModel& model, const LoraAdapter& adapter,
                     const std::vector<std::size_t>& tokens) {
    check_adapter_fits(model, adapter);
    check_tokens(tokens, model.vocab_size);
    const double scale = adapter.alpha / static_cast<double>(adapter.rank);
    WeightMatrix out(tokens.size(), model.vocab_size);
    std::vector<double> row;
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        logits_row(model.base_weight, adapter, scale, tokens[pos], row);
        std::copy(row.begin(), row.end(), out.data.begin() + pos * model.vocab_size);
    }
    if (!out.all_finite()) {
        throw NumericError("toy model: non-finite logits");
    }
    return out;
}

WeightMatrix forward(const ToyModel& model, const std::vector<std::size_t>& tokens) {
    check_tokens(tokens, model.vocab_size);
    WeightMatrix out(tokens.size(), model.vocab_size);
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        const std::size_t s = tokens[pos];
        std::copy(model.base_weight.data.begin() + s * model.vocab_size,
                  model.base_weight.data.begin() + (s + 1) * model.vocab_size,
                  out.data.begin() + pos * model.vocab_size);
    }
    return out;
}

double batch_loss(const ToyModel& model, const LoraAdapter& adapter,
                  const std::vector<TokenPairExample>& examples) {
    check_adapter_fits(model, adapter);
    if (examples.empty()) {
        throw ArgumentError("toy model: empty dataset");
    }
    const std::size_t positions = total_positions(examples);
    const double scale = adapter.alpha / static_cast<double>(adapter.rank);
    double loss = 0.0;
    std::vector<double> z;
    for (const TokenPairExample& example : examples) {
        check_tokens(example.source, model.vocab_size);
        check_tokens(example.target, model.vocab_size);
        for (std::size_t pos = 0; pos < example.source.size(); ++pos) {
            logits_row(model.base_weight, adapter, scale, example.source[pos], z);
            const double target_logit = z[example.target[pos]];
            const double lse = softmax_inplace(z);
            loss += lse - target_logit;
        }
    }
    return loss / static_cast<double>(positions);
}

namespace {

// Accumulates d(loss)/dA and d(loss)/dB for one position into grads.
// g must hold softmax(z) - onehot(target), already divided by the position
// count; path_scale carries alpha/rank and any dropout scaling.
void accumulate_position(const LoraAdapter& adapter, double path_scale, std::size_t s,
                         const std::vector<double>& g, GradientPair& grads) {
    const std::size_t v = adapter.b_factor.cols;
    const std::size_t rank = adapter.rank;
    for (std::size_t r = 0; r < rank; ++r) {
        const double* b_row = &adapter.b_factor.data[r * v];
        double dot = 0.0;
        for (std::size_t j = 0; j < v; ++j) {
            dot += g[j] * b_row[j];
        }
        grads.a_grad.at(s, r) += path_scale * dot;

        const double a_sr = path_scale * adapter.a_factor.at(s, r);
        if (a_sr == 0.0) continue;
        double* db_row = &grads.b_grad.data[r * v];
        for (std::size_t j = 0; j < v; ++j) {
            db_row[j] += a_sr * g[j];
        }
    }
}

}  // namespace

GradientPair gradients(const ToyModel& model, const LoraAdapter& adapter,
                       const std::vector<TokenPairExample>& examples) {
    check_adapter_fits(model, adapter);
    if (examples.empty()) {
        throw ArgumentError("toy model: empty dataset");
    }
    const std::size_t positions = total_positions(examples);
    const double scale = adapter.alpha / static_cast<double>(adapter.rank);
    GradientPair grads{WeightMatrix(adapter.a_factor.rows, adapter.a_factor.cols),
                       WeightMatrix(adapter.b_factor.rows, adapter.b_factor.cols)};
    std::vector<double> z;
    for (const TokenPairExample& example : examples) {
        check_tokens(example.source, model.vocab_size);
        check_tokens(example.target, model.vocab_size);
        for (std::size_t pos = 0; pos < example.source.size(); ++pos) {
            const std::size_t s = example.source[pos];
            logits_row(model.base_weight, adapter, scale, s, z);
            softmax_inplace(z);
            z[example.target[pos]] -= 1.0;
            for (double& g : z) g /= static_cast<double>(positions);
            accumulate_position(adapter, scale, s, z, grads);
        }
    }
    return grads;
}

double clip_gradients(GradientPair& grads, double max_norm) {
    double squared = 0.0;
    for (double g : grads.a_grad.data) squared += g * g;
    for (double g : grads.b_grad.data) squared += g * g;
    const double norm = std::sqrt(squared);
    if (norm > max_norm && norm > 0.0) {
        const double factor = max_norm / norm;
        for (double& g : grads.a_grad.data) g *= factor;
        for (double& g : grads.b_grad.data) g *= factor;
    }
    return norm;
}

LoraAdapter train_local(const ToyModel& model, const LoraAdapter& adapter,
                        const std::vector<TokenPairExample>& examples,
                        const TrainConfig& config) {
    check_train_config(config);
    check_adapter_fits(model, adapter);
    if (examples.empty()) {
        throw ArgumentError("train_local: empty dataset");
    }
    for (const TokenPairExample& example : examples) {
        if (example.source.size() != example.target.size()) {
            throw ArgumentError("train_local: source and target lengths differ");
        }
        check_tokens(example.source, model.vocab_size);
        check_tokens(example.target, model.vocab_size);
    }

    LoraAdapter result = adapter;
    const double scale = result.alpha / static_cast<double>(result.rank);
    const double keep_scale = config.dropout > 0.0 ? 1.0 / (1.0 - config.dropout) : 1.0;

    WeightMatrix m_a(result.a_factor.rows, result.a_factor.cols);
    WeightMatrix v_a(result.a_factor.rows, result.a_factor.cols);
    WeightMatrix m_b(result.b_factor.rows, result.b_factor.cols);
    WeightMatrix v_b(result.b_factor.rows, result.b_factor.cols);
    std::size_t step = 0;

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> z;

    auto adam_update = [&](WeightMatrix& param, const WeightMatrix& grad, WeightMatrix& m,
                           WeightMatrix& v) {
        const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
        for (std::size_t i = 0; i < param.data.size(); ++i) {
            m.data[i] = config.adam_beta1 * m.data[i] + (1.0 - config.adam_beta1) * grad.data[i];
            v.data[i] =
                config.adam_beta2 * v.data[i] + (1.0 - config.adam_beta2) * grad.data[i] * grad.data[i];
            const double m_hat = m.data[i] / bc1;
            const double v_hat = v.data[i] / bc2;
            param.data[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
        }
    };

    for (std::size_t epoch = 0; epoch < config.epochs_per_round; ++epoch) {
        shuffle_values(order, rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(start + config.batch_size, order.size());

            std::size_t batch_positions = 0;
            for (std::size_t k = start; k < stop; ++k) {
                batch_positions += examples[order[k]].source.size();
            }

            GradientPair grads{WeightMatrix(result.a_factor.rows, result.a_factor.cols),
                               WeightMatrix(result.b_factor.rows, result.b_factor.cols)};
            for (std::size_t k = start; k < stop; ++k) {
                const TokenPairExample& example = examples[order[k]];
                const bool keep = config.dropout == 0.0 || uniform01(rng) >= config.dropout;
                // A dropped example severs the adapter path, so its factor
                // gradient is exactly zero; it still counts in the batch mean.
                if (!keep) continue;
                const double path_scale = scale * keep_scale;
                for (std::size_t pos = 0; pos < example.source.size(); ++pos) {
                    const std::size_t s = example.source[pos];
                    logits_row(model.base_weight, result, path_scale, s, z);
                    softmax_inplace(z);
                    z[example.target[pos]] -= 1.0;
                    for (double& g : z) g /= static_cast<double>(batch_positions);
                    accumulate_position(result, path_scale, s, z, grads);
                }
            }
            clip_gradients(grads, config.max_grad_norm);
            ++step;
            adam_update(result.a_factor, grads.a_grad, m_a, v_a);
            adam_update(result.b_factor, grads.b_grad, m_b, v_b);
        }
    }
    check_adapter(result);
    return result;
}

double grad_check(const ToyModel& model, const LoraAdapter& adapter,
                  const std::vector<TokenPairExample>& examples) {
    const GradientPair analytic = gradients(model, adapter, examples);
    const double h = 1e-5;
    double worst = 0.0;
    LoraAdapter probe = adapter;

    auto check_entries = [&](WeightMatrix LoraAdapter::* factor, const WeightMatrix& grad) {
        WeightMatrix& target = probe.*factor;
        for (std::size_t i = 0; i < target.data.size(); ++i) {
            const double saved = target.data[i];
            target.data[i] = saved + h;
            const double up = batch_loss(model, probe, examples);
            target.data[i] = saved - h;
            const double down = batch_loss(model, probe, examples);
            target.data[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = grad.data[i];
            const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1.0});
            worst = std::max(worst, err);
        }
    };
    check_entries(&LoraAdapter::a_factor, analytic.a_grad);
    check_entries(&LoraAdapter::b_factor, analytic.b_grad);
    return worst;
}

namespace {

std::size_t argmax_lowest(const std::vector<double>& row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
        if (row[j] > row[best]) best = j;
    }
    return best;
}

}  // namespace

std::vector<std::size_t> translate(const ToyModel& model, const LoraAdapter& adapter,
                                   const std::vector<std::size_t>& source) {
    const WeightMatrix logits = forward(model, adapter, source);
    std::vector<std::size_t> out(source.size());
    std::vector<double> row(model.vocab_size);
    for (std::size_t pos = 0; pos < source.size(); ++pos) {
        std::copy(logits.data.begin() + pos * model.vocab_size,
                  logits.data.begin() + (pos + 1) * model.vocab_size, row.begin());
        out[pos] = argmax_lowest(row);
    }
    return out;
}

std::vector<std::size_t> translate(const ToyModel& model, const std::vector<std::size_t>& source) {
    check_tokens(source, model.vocab_size);
    std::vector<std::size_t> out(source.size());
    std::vector<double> row(model.vocab_size);
    for (std::size_t pos = 0; pos < source.size(); ++pos) {
        const std::size_t s = source[pos];
        std::copy(model.base_weight.data.begin() + s * model.vocab_size,
                  model.base_weight.data.begin() + (s + 1) * model.vocab_size, row.begin());
        out[pos] = argmax_lowest(row);
    }
    return out;
}

namespace {

template <typename TranslateFn>
double accuracy_over(const std::vector<TokenPairExample>& examples, TranslateFn decode) {
    if (examples.empty()) {
        throw ArgumentError("token_accuracy: empty dataset");
    }
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const TokenPairExample& example : examples) {
        if (example.source.size() != example.target.size()) {
            throw ArgumentError("token_accuracy: source and target lengths differ");
        }
        const std::vector<std::size_t> decoded = decode(example.source);
        for (std::size_t pos = 0; pos < decoded.size(); ++pos) {
            if (decoded[pos] == example.target[pos]) ++correct;
        }
        total += example.source.size();
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

double token_accuracy(const ToyModel& model, const LoraAdapter& adapter,
                      const std::vector<TokenPairExample>& examples) {
    return accuracy_over(examples, [&](const std::vector<std::size_t>& source) {
        return translate(model, adapter, source);
    });
}

double token_accuracy(const ToyModel& model, const std::vector<TokenPairExample>& examples) {
    return accuracy_over(examples,
                         [&](const std::vector<std::size_t>& source) { return translate(model, source); });
}

}  // namespace fedxlat
