// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fedxlat/code_structure.hpp"
#include "fedxlat/rng.hpp"

namespace fedxlat {

namespace {

std::string fetch_field(const nlohmann::json& record, const char* field) {
    const auto it = record.find(field);
    if (it == record.end() || !it->is_string()) {
        throw FormatError(std::string("missing or non-string field \"") + field + "\"");
    }
    return it->get<std::string>();
}

TranslationPair parse_record(const nlohmann::json& record) {
    TranslationPair pair;
    pair.id = fetch_field(record, "id");
    pair.project = fetch_field(record, "project");
    pair.source_lang = fetch_field(record, "source_lang");
    pair.target_lang = fetch_field(record, "target_lang");
    pair.source = fetch_field(record, "source");
    pair.target = fetch_field(record, "target");
    if (pair.source.empty() || pair.target.empty()) {
        throw FormatError("empty source or target code");
    }
    if (pair.source_lang == pair.target_lang) {
        throw FormatError("source and target languages are equal");
    }
    return pair;
}

}  // namespace

LoadResult load_pairs(const std::string& path, bool fail_fast) {
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("corpus: cannot open '" + path + "'");
    }
    LoadResult result;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string message;
        try {
            const nlohmann::json record = nlohmann::json::parse(line);
            TranslationPair pair = parse_record(record);
            if (!seen_ids.insert(pair.id).second) {
                throw FormatError("duplicate id \"" + pair.id + "\"");
            }
            result.pairs.push_back(std::move(pair));
            continue;
        } catch (const nlohmann::json::exception& e) {
            message = e.what();
        } catch (const FormatError& e) {
            message = e.what();
        }
        if (fail_fast) {
            throw FormatError("corpus: line " + std::to_string(line_no) + ": " + message);
        }
        result.issues.push_back({line_no, message});
    }
    return result;
}

void write_pairs(const std::string& path, const std::vector<TranslationPair>& pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ArgumentError("corpus: cannot write '" + path + "'");
    }
    for (const TranslationPair& pair : pairs) {
        nlohmann::json record;
        record["id"] = pair.id;
        record["project"] = pair.project;
        record["source_lang"] = pair.source_lang;
        record["target_lang"] = pair.target_lang;
        record["source"] = pair.source;
        record["target"] = pair.target;
        out << record.dump() << '\n';
    }
    if (!out) {
        throw ArgumentError("corpus: write to '" + path + "' failed");
    }
}

namespace {

std::vector<std::vector<TranslationPair>> partition_by_project(
    const std::vector<TranslationPair>& pairs, const PartitionSpec& spec) {
    if (spec.client_projects.empty()) {
        throw ArgumentError("partition: no clients in spec");
    }
    std::set<std::string> known;
    for (const TranslationPair& pair : pairs) known.insert(pair.project);

    std::map<std::string, std::size_t> owner;
    for (std::size_t client = 0; client < spec.client_projects.size(); ++client) {
        for (const std::string& project : spec.client_projects[client]) {
            if (!known.count(project)) {
                std::string listing;
                for (const std::string& name : known) {
                    if (!listing.empty()) listing += ", ";
                    listing += name;
                }
                throw ArgumentError("partition: unknown project '" + project +
                                    "' (corpus has: " + listing + ")");
            }
            if (!owner.emplace(project, client).second) {
                throw ArgumentError("partition: project '" + project +
                                    "' assigned to more than one client");
            }
        }
    }
    for (const std::string& project : known) {
        if (!owner.count(project)) {
            throw ArgumentError("partition: project '" + project + "' is not assigned");
        }
    }

    std::vector<std::vector<TranslationPair>> clients(spec.client_projects.size());
    for (const TranslationPair& pair : pairs) {
        clients[owner.at(pair.project)].push_back(pair);
    }
    for (std::size_t client = 0; client < clients.size(); ++client) {
        if (clients[client].empty()) {
            throw ArgumentError("partition: client " + std::to_string(client) +
                                " would receive no records");
        }
    }
    return clients;
}

std::vector<std::vector<TranslationPair>> partition_by_ratio(
    const std::vector<TranslationPair>& pairs, const PartitionSpec& spec, std::uint64_t seed) {
    if (spec.ratio.empty()) {
        throw ArgumentError("partition: no clients in spec");
    }
    std::size_t total = 0;
    for (std::size_t count : spec.ratio) {
        if (count == 0) {
            throw ArgumentError("partition: client counts must be positive");
        }
        total += count;
    }
    if (total != pairs.size()) {
        throw ArgumentError("partition: counts sum to " + std::to_string(total) + " but corpus has " +
                            std::to_string(pairs.size()) + " records");
    }

    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    shuffle_values(order, rng);

    std::vector<std::vector<TranslationPair>> clients(spec.ratio.size());
    std::size_t offset = 0;
    for (std::size_t client = 0; client < spec.ratio.size(); ++client) {
        clients[client].reserve(spec.ratio[client]);
        for (std::size_t k = 0; k < spec.ratio[client]; ++k) {
            clients[client].push_back(pairs[order[offset + k]]);
        }
        offset += spec.ratio[client];
    }
    return clients;
}

}  // namespace

std::vector<std::vector<TranslationPair>> partition(const std::vector<TranslationPair>& pairs,
                                                    const PartitionSpec& spec,
                                                    std::uint64_t seed) {
    if (pairs.empty()) {
        throw ArgumentError("partition: empty corpus");
    }
    if (spec.mode == PartitionMode::ByProject) {
        if (!spec.ratio.empty()) {
            throw ArgumentError("partition: by-project spec must not carry ratio counts");
        }
        return partition_by_project(pairs, spec);
    }
    if (!spec.client_projects.empty()) {
        throw ArgumentError("partition: by-ratio spec must not carry project sets");
    }
    return partition_by_ratio(pairs, spec, seed);
}

std::map<std::string, LengthStats> length_stats(const std::vector<TranslationPair>& pairs,
                                                LengthUnit unit, std::size_t bin_width) {
    if (bin_width == 0) {
        throw ArgumentError("length_stats: bin width must be positive");
    }
    std::map<std::string, std::vector<std::size_t>> lengths;
    auto measure = [&](const std::string& text) -> std::size_t {
        if (unit == LengthUnit::Chars) return text.size();
        return tokenize_code(text, Language::Toy).size();
    };
    for (const TranslationPair& pair : pairs) {
        lengths[pair.source_lang].push_back(measure(pair.source));
        lengths[pair.target_lang].push_back(measure(pair.target));
    }

    std::map<std::string, LengthStats> stats;
    for (auto& [language, values] : lengths) {
        std::sort(values.begin(), values.end());
        LengthStats s;
        s.count = values.size();
        s.min = values.front();
        s.max = values.back();
        s.bin_width = bin_width;
        double sum = 0.0;
        for (std::size_t v : values) sum += static_cast<double>(v);
        s.mean = sum / static_cast<double>(values.size());
        const std::size_t mid = values.size() / 2;
        s.median = values.size() % 2 == 1
                       ? static_cast<double>(values[mid])
                       : (static_cast<double>(values[mid - 1]) + static_cast<double>(values[mid])) / 2.0;
        s.histogram.assign(s.max / bin_width + 1, 0);
        for (std::size_t v : values) ++s.histogram[v / bin_width];
        stats.emplace(language, std::move(s));
    }
    return stats;
}

}  // namespace fedxlat
