// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace fedxlat {

void check_metric_config(const MetricConfig& config) {
    double sum = 0.0;
    for (double w : config.codebleu_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ArgumentError("metrics: combination weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ArgumentError("metrics: combination weights must sum to 1");
    }
    if (config.bleu_max_ngram == 0) {
        throw ArgumentError("metrics: bleu_max_ngram must be at least 1");
    }
    if (!(config.epsilon > 0.0)) {
        throw ArgumentError("metrics: epsilon must be positive");
    }
}

namespace {

using NgramCounts = std::map<std::string, std::size_t>;

// N-grams keyed by joining tokens with an unlikely separator byte.
NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
    NgramCounts counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

double brevity_penalty(std::size_t candidate_len, std::size_t reference_len) {
    if (candidate_len >= reference_len) return 1.0;
    return std::exp(1.0 - static_cast<double>(reference_len) / static_cast<double>(candidate_len));
}

bool ngram_has_keyword(const std::string& key, Language language) {
    std::size_t start = 0;
    for (;;) {
        const std::size_t sep = key.find('\x1f', start);
        const std::string token = key.substr(start, sep == std::string::npos ? sep : sep - start);
        if (is_keyword(token, language)) return true;
        if (sep == std::string::npos) return false;
        start = sep + 1;
    }
}

double bleu_impl(const std::vector<std::string>& candidate,
                 const std::vector<std::string>& reference, const MetricConfig& config,
                 bool weighted, Language language) {
    if (candidate.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= config.bleu_max_ngram; ++n) {
        const NgramCounts cand_counts = count_ngrams(candidate, n);
        const NgramCounts ref_counts = count_ngrams(reference, n);
        double matched = 0.0;
        double total = 0.0;
        for (const auto& [key, count] : cand_counts) {
            const double weight =
                weighted && ngram_has_keyword(key, language) ? config.keyword_weight : 1.0;
            total += weight * static_cast<double>(count);
            const auto it = ref_counts.find(key);
            if (it != ref_counts.end()) {
                matched += weight * static_cast<double>(std::min(count, it->second));
            }
        }
        const double precision = (total > 0.0 && matched > 0.0) ? matched / total : config.epsilon;
        log_sum += std::log(precision);
    }
    const double geometric = std::exp(log_sum / static_cast<double>(config.bleu_max_ngram));
    return brevity_penalty(candidate.size(), reference.size()) * geometric;
}

}  // namespace

double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
            const MetricConfig& config) {
    return bleu_impl(candidate, reference, config, false, Language::Toy);
}

double weighted_ngram_bleu(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference, Language language,
                           const MetricConfig& config) {
    return bleu_impl(candidate, reference, config, true, language);
}

std::string stem_token(const std::string& token) {
    std::string s = token;
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    auto ends_with = [&](const char* suffix) {
        const std::size_t len = std::char_traits<char>::length(suffix);
        return s.size() >= len && s.compare(s.size() - len, len, suffix) == 0;
    };
    if (ends_with("sses")) {
        s.erase(s.size() - 2);
    } else if (ends_with("ies")) {
        s.erase(s.size() - 2);  // "ies" -> "i"
    } else if (!ends_with("ss") && ends_with("s") && s.size() > 3) {
        s.pop_back();
    }
    if (ends_with("ing") && s.size() > 5) {
        s.erase(s.size() - 3);
    } else if (ends_with("ed") && s.size() > 4) {
        s.erase(s.size() - 2);
    }
    return s;
}

namespace {

// One alignment stage: scan unmatched candidate tokens left to right, pairing
// each with an unmatched reference token under `same`. Prefer the reference
// position that continues the previous pair's chunk, else the leftmost match.
template <typename SameFn>
void align_stage(const std::vector<std::string>& candidate,
                 const std::vector<std::string>& reference, std::vector<std::ptrdiff_t>& cand_to_ref,
                 std::vector<bool>& ref_used, SameFn same) {
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (cand_to_ref[i] >= 0) continue;
        std::ptrdiff_t chosen = -1;
        if (i > 0 && cand_to_ref[i - 1] >= 0) {
            const std::size_t next = static_cast<std::size_t>(cand_to_ref[i - 1]) + 1;
            if (next < reference.size() && !ref_used[next] && same(candidate[i], reference[next])) {
                chosen = static_cast<std::ptrdiff_t>(next);
            }
        }
        if (chosen < 0) {
            for (std::size_t j = 0; j < reference.size(); ++j) {
                if (!ref_used[j] && same(candidate[i], reference[j])) {
                    chosen = static_cast<std::ptrdiff_t>(j);
                    break;
                }
            }
        }
        if (chosen >= 0) {
            cand_to_ref[i] = chosen;
            ref_used[static_cast<std::size_t>(chosen)] = true;
        }
    }
}

}  // namespace

double meteor(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
              const MetricConfig& config) {
    if (candidate.empty() || reference.empty()) return 0.0;

    std::vector<std::ptrdiff_t> cand_to_ref(candidate.size(), -1);
    std::vector<bool> ref_used(reference.size(), false);
    align_stage(candidate, reference, cand_to_ref, ref_used,
                [](const std::string& a, const std::string& b) { return a == b; });
    align_stage(candidate, reference, cand_to_ref, ref_used,
                [](const std::string& a, const std::string& b) {
                    return stem_token(a) == stem_token(b);
                });

    std::size_t matches = 0;
    std::size_t chunks = 0;
    std::ptrdiff_t prev_ref = -2;
    bool prev_matched = false;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        if (cand_to_ref[i] < 0) {
            prev_matched = false;
            continue;
        }
        ++matches;
        if (!(prev_matched && cand_to_ref[i] == prev_ref + 1)) {
            ++chunks;
        }
        prev_ref = cand_to_ref[i];
        prev_matched = true;
    }
    if (matches == 0) return 0.0;

    const double p = static_cast<double>(matches) / static_cast<double>(candidate.size());
    const double r = static_cast<double>(matches) / static_cast<double>(reference.size());
    const double f = p * r / (config.meteor_alpha * p + (1.0 - config.meteor_alpha) * r);
    const double penalty =
        config.meteor_gamma *
        std::pow(static_cast<double>(chunks) / static_cast<double>(matches), config.meteor_beta);
    return f * (1.0 - penalty);
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty()) return 0.0;
    const std::size_t cols = reference.size() + 1;
    std::vector<std::size_t> prev(cols, 0);
    std::vector<std::size_t> curr(cols, 0);
    for (std::size_t i = 1; i <= candidate.size(); ++i) {
        for (std::size_t j = 1; j <= reference.size(); ++j) {
            if (candidate[i - 1] == reference[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    const double lcs = static_cast<double>(prev[reference.size()]);
    if (lcs == 0.0) return 0.0;
    return 2.0 * lcs / static_cast<double>(candidate.size() + reference.size());
}

double syntax_match(const std::string& candidate, const std::string& reference, Language language,
                    const SyntaxTreeProvider* provider) {
    const SyntaxTreeProvider& trees = provider ? *provider : bundled_tree_provider();
    const std::map<std::string, std::size_t> ref_counts =
        subtree_counts(trees.parse(reference, language), language);
    std::size_t total = 0;
    for (const auto& [key, count] : ref_counts) {
        (void)key;
        total += count;
    }
    if (total == 0) return 1.0;
    const std::map<std::string, std::size_t> cand_counts =
        subtree_counts(trees.parse(candidate, language), language);
    std::size_t matched = 0;
    for (const auto& [key, count] : ref_counts) {
        const auto it = cand_counts.find(key);
        if (it != cand_counts.end()) {
            matched += std::min(count, it->second);
        }
    }
    return static_cast<double>(matched) / static_cast<double>(total);
}

double dataflow_match(const std::string& candidate, const std::string& reference,
                      Language language) {
    std::vector<DataflowEdge> ref_edges = dataflow_edges(reference, language);
    if (ref_edges.empty()) return 1.0;
    std::vector<DataflowEdge> cand_edges = dataflow_edges(candidate, language);
    std::sort(ref_edges.begin(), ref_edges.end());
    std::sort(cand_edges.begin(), cand_edges.end());
    // Clipped multiset intersection size.
    std::size_t matched = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ref_edges.size() && j < cand_edges.size()) {
        if (ref_edges[i] == cand_edges[j]) {
            ++matched;
            ++i;
            ++j;
        } else if (ref_edges[i] < cand_edges[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(matched) / static_cast<double>(ref_edges.size());
}

MetricReport score_pair(const std::string& candidate, const std::string& reference,
                        Language language, const MetricConfig& config) {
    check_metric_config(config);
    const std::vector<std::string> cand_tokens = tokenize_code(candidate, language);
    const std::vector<std::string> ref_tokens = tokenize_code(reference, language);

    MetricReport report;
    report.bleu = bleu(cand_tokens, ref_tokens, config);
    report.meteor = meteor(cand_tokens, ref_tokens, config);
    report.rouge_l = rouge_l(cand_tokens, ref_tokens);
    report.codebleu_parts.ngram = report.bleu;
    report.codebleu_parts.weighted_ngram =
        weighted_ngram_bleu(cand_tokens, ref_tokens, language, config);
    report.codebleu_parts.syntax = syntax_match(candidate, reference, language);
    report.codebleu_parts.dataflow = dataflow_match(candidate, reference, language);
    const auto& w = config.codebleu_weights;
    report.codebleu = w[0] * report.codebleu_parts.ngram +
                      w[1] * report.codebleu_parts.weighted_ngram +
                      w[2] * report.codebleu_parts.syntax + w[3] * report.codebleu_parts.dataflow;
    return report;
}

MetricReport score_corpus(const std::vector<std::string>& candidates,
                          const std::vector<std::string>& references, Language language,
                          const MetricConfig& config) {
    if (candidates.size() != references.size()) {
        throw ArgumentError("metrics: candidate and reference counts differ");
    }
    if (candidates.empty()) {
        throw ArgumentError("metrics: empty corpus");
    }
    MetricReport mean;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const MetricReport one = score_pair(candidates[i], references[i], language, config);
        mean.bleu += one.bleu;
        mean.meteor += one.meteor;
        mean.rouge_l += one.rouge_l;
        mean.codebleu += one.codebleu;
        mean.codebleu_parts.ngram += one.codebleu_parts.ngram;
        mean.codebleu_parts.weighted_ngram += one.codebleu_parts.weighted_ngram;
        mean.codebleu_parts.syntax += one.codebleu_parts.syntax;
        mean.codebleu_parts.dataflow += one.codebleu_parts.dataflow;
    }
    const double count = static_cast<double>(candidates.size());
    mean.bleu /= count;
    mean.meteor /= count;
    mean.rouge_l /= count;
    mean.codebleu /= count;
    mean.codebleu_parts.ngram /= count;
    mean.codebleu_parts.weighted_ngram /= count;
    mean.codebleu_parts.syntax /= count;
    mean.codebleu_parts.dataflow /= count;
    return mean;
}

}  // namespace fedxlat
