// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fedxlat/errors.hpp"

namespace fedxlat {

// One source/target snippet pair. JSONL schema, one object per line:
// {"id", "project", "source_lang", "target_lang", "source", "target"}.
struct TranslationPair {
    std::string id;
    std::string project;
    std::string source_lang;
    std::string target_lang;
    std::string source;
    std::string target;

    bool operator==(const TranslationPair&) const = default;
};

struct LoadIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct LoadResult {
    std::vector<TranslationPair> pairs;
    std::vector<LoadIssue> issues;
};

// Reads a JSONL corpus. With fail_fast (the default) the first malformed
// line throws a format error naming it; otherwise bad lines are skipped and
// reported in issues. Rejects missing fields, empty source/target, equal
// language tags, and duplicate ids.
LoadResult load_pairs(const std::string& path, bool fail_fast = true);

// Writes pairs as JSONL, one object per line, stable field order.
void write_pairs(const std::string& path, const std::vector<TranslationPair>& pairs);

enum class PartitionMode {
    ByProject,
    ByRatio,
};

struct PartitionSpec {
    PartitionMode mode = PartitionMode::ByRatio;
    // ByProject: project names per client; sets must be disjoint and cover
    // every project present in the corpus.
    std::vector<std::vector<std::string>> client_projects;
    // ByRatio: record counts per client; must sum to the corpus size.
    std::vector<std::size_t> ratio;
};

// Splits pairs into disjoint per-client lists covering the input exactly.
// ByProject keeps whole projects together; ByRatio applies a seeded shuffle
// followed by contiguous cuts. Empty clients are rejected.
std::vector<std::vector<TranslationPair>> partition(const std::vector<TranslationPair>& pairs,
                                                    const PartitionSpec& spec,
                                                    std::uint64_t seed);

enum class LengthUnit {
    Chars,
    Tokens,
};

struct LengthStats {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    std::size_t min = 0;
    std::size_t max = 0;
    std::size_t bin_width = 0;
    std::vector<std::size_t> histogram;  // bin i covers [i*bin_width, (i+1)*bin_width)
};

// Length statistics per language tag: source texts count toward source_lang,
// target texts toward target_lang. Empty input gives an empty map.
std::map<std::string, LengthStats> length_stats(const std::vector<TranslationPair>& pairs,
                                                LengthUnit unit = LengthUnit::Chars,
                                                std::size_t bin_width = 50);

}  // namespace fedxlat
