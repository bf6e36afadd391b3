// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "fedxlat/code_structure.hpp"
#include "fedxlat/errors.hpp"

namespace fedxlat {

struct MetricConfig {
    // Combination weights for {ngram, weighted_ngram, syntax, dataflow};
    // must be non-negative and sum to 1 within 1e-9.
    std::array<double, 4> codebleu_weights{0.25, 0.25, 0.25, 0.25};
    std::size_t bleu_max_ngram = 4;
    double epsilon = 1e-9;  // replaces zero n-gram precisions
    double keyword_weight = 5.0;
    double meteor_alpha = 0.9;
    double meteor_beta = 3.0;
    double meteor_gamma = 0.5;
};

void check_metric_config(const MetricConfig& config);

struct CodeBleuParts {
    double ngram = 0.0;
    double weighted_ngram = 0.0;
    double syntax = 0.0;
    double dataflow = 0.0;
};

struct MetricReport {
    double bleu = 0.0;
    double meteor = 0.0;
    double rouge_l = 0.0;
    double codebleu = 0.0;
    CodeBleuParts codebleu_parts;
};

// Sentence BLEU-4: geometric mean of modified n-gram precisions (zero
// precisions and empty n-gram levels replaced by epsilon) times the brevity
// penalty. Empty candidate scores 0.
double bleu(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
            const MetricConfig& config = {});

// BLEU with n-grams containing a language keyword weighted keyword_weight-fold
// in both precision numerator and denominator.
double weighted_ngram_bleu(const std::vector<std::string>& candidate,
                           const std::vector<std::string>& reference, Language language,
                           const MetricConfig& config = {});

// Unigram alignment in two stages (exact match, then suffix-stripped stems),
// greedy and chunk-extending; F = P*R / (alpha*P + (1-alpha)*R); score =
// F * (1 - gamma*(chunks/matches)^beta). Zero matches score 0.
double meteor(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
              const MetricConfig& config = {});

// Suffix-stripping stemmer used by the meteor stem stage.
std::string stem_token(const std::string& token);

// LCS-based F-score with beta = 1: F = 2*lcs / (|candidate| + |reference|).
double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

// Fraction of reference subtrees of depth >= 2 present in the candidate
// (clipped multiset counts, identifiers anonymized). A reference with no
// qualifying subtree scores 1.0.
double syntax_match(const std::string& candidate, const std::string& reference, Language language,
                    const SyntaxTreeProvider* provider = nullptr);

// Fraction of reference def-use edges present in the candidate (clipped
// multiset counts over anonymized edges). A reference with no edges scores
// 1.0.
double dataflow_match(const std::string& candidate, const std::string& reference,
                      Language language);

// All metrics for one candidate/reference snippet pair.
MetricReport score_pair(const std::string& candidate, const std::string& reference,
                        Language language, const MetricConfig& config = {});

// Per-field mean of score_pair over aligned snippet lists.
MetricReport score_corpus(const std::vector<std::string>& candidates,
                          const std::vector<std::string>& references, Language language,
                          const MetricConfig& config = {});

}  // namespace fedxlat
