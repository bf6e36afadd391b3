// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0
//
// Operator entry point: partition -> simulate -> evaluate -> stats, plus a
// coordinator server. Every command is deterministic under --seed and exits
// nonzero on any error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fedxlat/coordinator.hpp"
#include "fedxlat/corpus.hpp"
#include "fedxlat/errors.hpp"
#include "fedxlat/federation.hpp"
#include "fedxlat/metrics.hpp"
#include "fedxlat/rng.hpp"
#include "fedxlat/stats.hpp"
#include "fedxlat/toytrainer.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace {

constexpr const char* kToolVersion = "fedxlat 0.1.0";

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char separator) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream stream(text);
    while (std::getline(stream, part, separator)) parts.push_back(part);
    return parts;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fedxlat::ArgumentError("cannot write '" + path.string() + "'");
    out << text;
}

// Reads one snippet per line: either a JSON object with a "text" field or a
// raw text line.
std::vector<std::string> read_snippets(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fedxlat::ArgumentError("cannot read '" + path + "'");
    std::vector<std::string> snippets;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_object() && parsed.contains("text") && parsed["text"].is_string()) {
            snippets.push_back(parsed["text"].get<std::string>());
        } else {
            snippets.push_back(line);
        }
    }
    return snippets;
}

json report_to_json(const fedxlat::MetricReport& report) {
    return json{{"bleu", report.bleu},
                {"weighted_ngram", report.codebleu_parts.weighted_ngram},
                {"syntax_match", report.codebleu_parts.syntax},
                {"dataflow_match", report.codebleu_parts.dataflow},
                {"codebleu", report.codebleu},
                {"meteor", report.meteor},
                {"rouge_l", report.rouge_l}};
}

json round_to_json(const fedxlat::RoundRecord& record) {
    json entry = {{"round", record.round_index},
                  {"method", fedxlat::to_string(record.method)},
                  {"aggregate_rank", record.aggregate_rank},
                  {"aggregate_checksum", record.aggregate_checksum},
                  {"token_accuracy", record.metrics.token_accuracy}};
    entry["metrics"] = report_to_json(record.metrics.report);
    return entry;
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.6f", value);
    return buffer;
}

struct PartitionFlags {
    std::string corpus_path;
    std::string out_dir;
    std::string ratio;
    std::string by_project;
    std::uint64_t seed = 0;
};

fedxlat::PartitionSpec parse_partition_spec(const std::string& ratio,
                                            const std::string& by_project) {
    fedxlat::PartitionSpec spec;
    if (!ratio.empty() && !by_project.empty()) {
        throw fedxlat::ArgumentError("--ratio and --by-project are mutually exclusive");
    }
    if (ratio.empty() && by_project.empty()) {
        throw fedxlat::ArgumentError("one of --ratio or --by-project is required");
    }
    if (!ratio.empty()) {
        spec.mode = fedxlat::PartitionMode::ByRatio;
        for (const std::string& part : split(ratio, ',')) {
            std::size_t parsed = 0;
            try {
                parsed = std::stoull(part);
            } catch (const std::exception&) {
                throw fedxlat::ArgumentError("--ratio needs comma-separated counts");
            }
            spec.ratio.push_back(parsed);
        }
    } else {
        spec.mode = fedxlat::PartitionMode::ByProject;
        for (const std::string& group : split(by_project, ';')) {
            spec.client_projects.push_back(split(group, ','));
        }
    }
    return spec;
}

int cmd_partition(const PartitionFlags& flags) {
    const fedxlat::LoadResult loaded = fedxlat::load_pairs(flags.corpus_path);
    const fedxlat::PartitionSpec spec = parse_partition_spec(flags.ratio, flags.by_project);
    const auto clients = fedxlat::partition(loaded.pairs, spec, flags.seed);

    std::filesystem::create_directories(flags.out_dir);
    json manifest = {{"tool_version", kToolVersion},
                     {"command", "partition"},
                     {"seed", flags.seed},
                     {"corpus", flags.corpus_path},
                     {"clients", json::array()}};
    for (std::size_t i = 0; i < clients.size(); ++i) {
        const std::string name = "client_" + std::to_string(i) + ".jsonl";
        const std::filesystem::path path = std::filesystem::path(flags.out_dir) / name;
        fedxlat::write_pairs(path.string(), clients[i]);
        manifest["clients"].push_back({{"file", name}, {"records", clients[i].size()}});
        std::cout << name << ": " << clients[i].size() << " records\n";
    }
    write_text(std::filesystem::path(flags.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

struct SimulateFlags {
    std::string out_dir;
    std::size_t clients = 2;
    std::size_t rounds = 20;
    std::string method = "fedavg";
    std::string task = "synthetic";
    std::uint64_t seed = 0;
    std::size_t vocab = 64;
    std::size_t subset = 20;
    std::size_t seq_len = 16;
    std::size_t samples = 500;
    std::size_t test_samples = 200;
    std::size_t rank = 8;
    double alpha = 16.0;
    std::string corpus_path;
    std::string ratio;
    std::string by_project;
    double test_fraction = 0.1;
};

// Corpus-backed task: token ids come from a frequency-ranked vocabulary over
// the whole corpus (last id is the out-of-vocabulary bucket), and each pair
// becomes one position-aligned sequence truncated to the shorter side.
struct EncodedCorpus {
    std::vector<std::vector<fedxlat::TokenPairExample>> client_data;
    std::vector<fedxlat::TokenPairExample> test_set;
};

std::vector<std::size_t> encode_tokens(const std::vector<std::string>& tokens,
                                       const std::map<std::string, std::size_t>& vocab,
                                       std::size_t oov_id) {
    std::vector<std::size_t> ids;
    ids.reserve(tokens.size());
    for (const std::string& token : tokens) {
        const auto it = vocab.find(token);
        ids.push_back(it == vocab.end() ? oov_id : it->second);
    }
    return ids;
}

EncodedCorpus encode_corpus_task(const SimulateFlags& flags) {
    if (flags.corpus_path.empty()) {
        throw fedxlat::ArgumentError("--task corpus needs --corpus");
    }
    const fedxlat::LoadResult loaded = fedxlat::load_pairs(flags.corpus_path);
    if (!(flags.test_fraction > 0.0) || flags.test_fraction >= 1.0) {
        throw fedxlat::ArgumentError("--test-fraction must lie in (0, 1)");
    }

    std::map<std::string, std::size_t> counts;
    for (const fedxlat::TranslationPair& pair : loaded.pairs) {
        for (const auto& token : fedxlat::tokenize_code(pair.source, fedxlat::Language::Toy)) {
            ++counts[token];
        }
        for (const auto& token : fedxlat::tokenize_code(pair.target, fedxlat::Language::Toy)) {
            ++counts[token];
        }
    }
    // Rank by frequency, ties lexicographic, so the vocabulary is stable.
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::map<std::string, std::size_t> vocab;
    const std::size_t oov_id = flags.vocab - 1;
    for (std::size_t i = 0; i + 1 < flags.vocab && i < ranked.size(); ++i) {
        vocab[ranked[i].first] = i;
    }

    const auto encode_pair = [&](const fedxlat::TranslationPair& pair) {
        fedxlat::TokenPairExample example;
        example.source = encode_tokens(
            fedxlat::tokenize_code(pair.source, fedxlat::Language::Toy), vocab, oov_id);
        example.target = encode_tokens(
            fedxlat::tokenize_code(pair.target, fedxlat::Language::Toy), vocab, oov_id);
        const std::size_t len =
            std::min({example.source.size(), example.target.size(), flags.seq_len});
        example.source.resize(len);
        example.target.resize(len);
        return example;
    };

    // Seeded shuffle, then a held-out test slice ahead of partitioning.
    std::vector<fedxlat::TranslationPair> pairs = loaded.pairs;
    std::mt19937_64 rng(fedxlat::derive_seed(flags.seed, 0x636f7270));
    fedxlat::shuffle_values(pairs, rng);
    const std::size_t test_count =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     static_cast<double>(pairs.size()) * flags.test_fraction));
    if (test_count >= pairs.size()) {
        throw fedxlat::ArgumentError("corpus too small for the requested test fraction");
    }

    EncodedCorpus encoded;
    for (std::size_t i = 0; i < test_count; ++i) {
        const fedxlat::TokenPairExample example = encode_pair(pairs[i]);
        if (!example.source.empty()) encoded.test_set.push_back(example);
    }
    std::vector<fedxlat::TranslationPair> train(pairs.begin() + static_cast<long>(test_count),
                                                pairs.end());

    fedxlat::PartitionSpec spec;
    if (!flags.ratio.empty() || !flags.by_project.empty()) {
        spec = parse_partition_spec(flags.ratio, flags.by_project);
    } else {
        spec.mode = fedxlat::PartitionMode::ByRatio;
        const std::size_t base = train.size() / flags.clients;
        spec.ratio.assign(flags.clients, base);
        spec.ratio.back() += train.size() - base * flags.clients;
    }
    const auto partitions = fedxlat::partition(train, spec, flags.seed);
    if (partitions.size() != flags.clients) {
        throw fedxlat::ArgumentError("partition produced a different client count than --clients");
    }
    for (const auto& client : partitions) {
        std::vector<fedxlat::TokenPairExample> examples;
        for (const fedxlat::TranslationPair& pair : client) {
            const fedxlat::TokenPairExample example = encode_pair(pair);
            if (!example.source.empty()) examples.push_back(example);
        }
        if (examples.empty()) {
            throw fedxlat::ArgumentError("a client ended up with no usable training pairs");
        }
        encoded.client_data.push_back(std::move(examples));
    }
    if (encoded.test_set.empty()) {
        throw fedxlat::ArgumentError("the held-out test slice has no usable pairs");
    }
    return encoded;
}

int cmd_simulate(const SimulateFlags& flags) {
    fedxlat::FederationConfig config;
    config.rounds = flags.rounds;
    config.aggregation.method = fedxlat::aggregation_method_from_string(flags.method);
    config.client_count = flags.clients;
    config.seed = flags.seed;
    config.rank = flags.rank;
    config.alpha = flags.alpha;

    std::vector<std::vector<fedxlat::TokenPairExample>> client_data;
    std::vector<fedxlat::TokenPairExample> test_set;
    json task_echo;
    if (flags.task == "synthetic") {
        const fedxlat::SyntheticTaskSpec task = fedxlat::make_disjoint_task(
            flags.vocab, flags.clients, flags.subset, flags.seq_len, flags.samples, flags.seed);
        for (std::size_t client = 0; client < flags.clients; ++client) {
            client_data.push_back(fedxlat::synthetic_training_data(task, client, flags.seed));
        }
        test_set = fedxlat::synthetic_test_data(task, flags.test_samples, flags.seed);
        task_echo = {{"task", "synthetic"},
                     {"vocab", flags.vocab},
                     {"subset", flags.subset},
                     {"sequence_length", flags.seq_len},
                     {"samples_per_client", flags.samples},
                     {"test_samples", flags.test_samples}};
    } else if (flags.task == "corpus") {
        EncodedCorpus encoded = encode_corpus_task(flags);
        client_data = std::move(encoded.client_data);
        test_set = std::move(encoded.test_set);
        task_echo = {{"task", "corpus"},
                     {"corpus", flags.corpus_path},
                     {"vocab", flags.vocab},
                     {"sequence_length", flags.seq_len},
                     {"test_fraction", flags.test_fraction}};
    } else {
        throw fedxlat::ArgumentError("unknown task '" + flags.task + "'");
    }

    fedxlat::FederationState state = fedxlat::make_federation_state(
        fedxlat::make_toy_model(flags.vocab), config, std::move(client_data),
        std::move(test_set));
    const std::vector<fedxlat::RoundRecord> records = fedxlat::run_simulation(state);
    const std::size_t best = fedxlat::select_best_round(records);

    std::filesystem::create_directories(flags.out_dir);
    std::ostringstream csv;
    csv << "round,method,aggregate_rank,aggregate_checksum,bleu,weighted_ngram,syntax_match,"
           "dataflow_match,codebleu,meteor,rouge_l,token_accuracy\n";
    std::ostringstream plot;
    plot << "# round bleu meteor rouge_l codebleu token_accuracy\n";
    json rounds_json = json::array();
    for (const fedxlat::RoundRecord& record : records) {
        const fedxlat::MetricReport& report = record.metrics.report;
        csv << record.round_index << ',' << fedxlat::to_string(record.method) << ','
            << record.aggregate_rank << ',' << record.aggregate_checksum << ','
            << format_double(report.bleu) << ','
            << format_double(report.codebleu_parts.weighted_ngram) << ','
            << format_double(report.codebleu_parts.syntax) << ','
            << format_double(report.codebleu_parts.dataflow) << ','
            << format_double(report.codebleu) << ',' << format_double(report.meteor) << ','
            << format_double(report.rouge_l) << ','
            << format_double(record.metrics.token_accuracy) << '\n';
        plot << record.round_index << ' ' << format_double(report.bleu) << ' '
             << format_double(report.meteor) << ' ' << format_double(report.rouge_l) << ' '
             << format_double(report.codebleu) << ' '
             << format_double(record.metrics.token_accuracy) << '\n';
        rounds_json.push_back(round_to_json(record));
    }

    json manifest = {{"tool_version", kToolVersion},
                     {"command", "simulate"},
                     {"seed", flags.seed},
                     {"config",
                      {{"clients", flags.clients},
                       {"rounds", flags.rounds},
                       {"method", flags.method},
                       {"rank", flags.rank},
                       {"alpha", flags.alpha},
                       {"task", task_echo}}},
                     {"files",
                      {{"rounds_csv", "rounds.csv"},
                       {"rounds_json", "rounds.json"},
                       {"plot", "plot.dat"}}},
                     {"rounds", rounds_json},
                     {"best_round", best}};

    const std::filesystem::path out(flags.out_dir);
    write_text(out / "rounds.csv", csv.str());
    write_text(out / "rounds.json", rounds_json.dump(2) + "\n");
    write_text(out / "plot.dat", plot.str());
    write_text(out / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "round  method  rank  bleu    meteor  rouge_l codebleu accuracy\n";
    for (const fedxlat::RoundRecord& record : records) {
        std::printf("%-6zu %-7s %-5zu %s %s %s %s %s\n", record.round_index,
                    fedxlat::to_string(record.method), record.aggregate_rank,
                    format_double(record.metrics.report.bleu).c_str(),
                    format_double(record.metrics.report.meteor).c_str(),
                    format_double(record.metrics.report.rouge_l).c_str(),
                    format_double(record.metrics.report.codebleu).c_str(),
                    format_double(record.metrics.token_accuracy).c_str());
    }
    std::cout << "best round: " << best << "\n";
    return 0;
}

struct EvaluateFlags {
    std::string candidates_path;
    std::string references_path;
    std::string language = "java";
    std::string out_dir;
};

int cmd_evaluate(const EvaluateFlags& flags) {
    const std::vector<std::string> candidates = read_snippets(flags.candidates_path);
    const std::vector<std::string> references = read_snippets(flags.references_path);
    if (candidates.size() != references.size()) {
        std::ostringstream message;
        message << "candidate count " << candidates.size() << " does not match reference count "
                << references.size();
        throw fedxlat::ArgumentError(message.str());
    }
    const fedxlat::Language language = fedxlat::language_from_string(flags.language);

    json records = json::array();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const fedxlat::MetricReport report =
            fedxlat::score_pair(candidates[i], references[i], language);
        json entry = report_to_json(report);
        entry["index"] = i;
        records.push_back(entry);
    }
    const fedxlat::MetricReport corpus = fedxlat::score_corpus(candidates, references, language);

    json output = {{"tool_version", kToolVersion},
                   {"command", "evaluate"},
                   {"language", flags.language},
                   {"records", records},
                   {"corpus", report_to_json(corpus)}};
    if (!flags.out_dir.empty()) {
        std::filesystem::create_directories(flags.out_dir);
        write_text(std::filesystem::path(flags.out_dir) / "evaluation.json",
                   output.dump(2) + "\n");
    }
    std::cout << "pairs: " << candidates.size() << "\n"
              << "bleu: " << format_double(corpus.bleu) << "\n"
              << "weighted_ngram: " << format_double(corpus.codebleu_parts.weighted_ngram) << "\n"
              << "syntax_match: " << format_double(corpus.codebleu_parts.syntax) << "\n"
              << "dataflow_match: " << format_double(corpus.codebleu_parts.dataflow) << "\n"
              << "codebleu: " << format_double(corpus.codebleu) << "\n"
              << "meteor: " << format_double(corpus.meteor) << "\n"
              << "rouge_l: " << format_double(corpus.rouge_l) << "\n";
    return 0;
}

struct StatsFlags {
    std::string test = "mannwhitney";
    std::string input_path;
    std::string out_dir;
};

int cmd_stats(const StatsFlags& flags) {
    std::ifstream in(flags.input_path, std::ios::binary);
    if (!in) throw fedxlat::ArgumentError("cannot read '" + flags.input_path + "'");
    json parsed;
    try {
        in >> parsed;
    } catch (const json::exception& error) {
        throw fedxlat::FormatError(std::string("stats input: ") + error.what());
    }

    fedxlat::TestResult result;
    if (flags.test == "mannwhitney") {
        if (!parsed.contains("x") || !parsed.contains("y")) {
            throw fedxlat::ArgumentError("mannwhitney input needs \"x\" and \"y\" arrays");
        }
        result = fedxlat::mann_whitney_u(parsed["x"].get<std::vector<double>>(),
                                         parsed["y"].get<std::vector<double>>());
    } else {
        if (!parsed.contains("pairs")) {
            throw fedxlat::ArgumentError("wilcoxon input needs a \"pairs\" array");
        }
        std::vector<std::pair<double, double>> pairs;
        for (const auto& entry : parsed["pairs"]) {
            pairs.emplace_back(entry.at(0).get<double>(), entry.at(1).get<double>());
        }
        result = fedxlat::wilcoxon_signed_rank(pairs);
    }

    json output = {{"tool_version", kToolVersion}, {"command", "stats"},
                   {"test", fedxlat::to_string(result.method)},
                   {"statistic", result.statistic},
                   {"p_value", result.p_value},
                   {"n", result.n},
                   {"m", result.m},
                   {"exact", result.exact}};
    if (!flags.out_dir.empty()) {
        std::filesystem::create_directories(flags.out_dir);
        write_text(std::filesystem::path(flags.out_dir) / "stats.json", output.dump(2) + "\n");
    }
    std::cout << output.dump(2) << "\n";
    return 0;
}

struct ServeFlags {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::uint64_t seed = 0;
    bool random_tokens = true;
};

int cmd_serve(const ServeFlags& flags) {
    fedxlat::CoordinatorCore core =
        flags.random_tokens ? fedxlat::CoordinatorCore()
                            : fedxlat::CoordinatorCore(flags.seed, nullptr);
    fedxlat::CoordinatorServer server(core);
    if (!server.start(flags.host, flags.port)) {
        throw fedxlat::ArgumentError("cannot bind " + flags.host + ":" +
                                     std::to_string(flags.port));
    }
    std::cout << "listening on " << flags.host << ":" << server.port() << "\n" << std::flush;
    std::promise<void>().get_future().wait();  // serve until killed
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated LoRA translation workbench"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    PartitionFlags partition_flags;
    CLI::App* partition = app.add_subcommand("partition", "Split a JSONL corpus across clients");
    partition->add_option("corpus", partition_flags.corpus_path, "corpus JSONL path")
        ->required();
    partition->add_option("--out", partition_flags.out_dir, "output directory")->required();
    partition->add_option("--ratio", partition_flags.ratio, "per-client record counts, e.g. 1800,8993");
    partition->add_option("--by-project", partition_flags.by_project,
                          "per-client project groups, e.g. \"projA,projB;projC\"");
    partition->add_option("--seed", partition_flags.seed, "shuffle seed")
        ->envname("FEDXLAT_SEED");

    SimulateFlags simulate_flags;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a federated training simulation");
    simulate->add_option("--out", simulate_flags.out_dir, "output directory")->required();
    simulate->add_option("--clients", simulate_flags.clients, "client count");
    simulate->add_option("--rounds", simulate_flags.rounds, "federated rounds");
    simulate->add_option("--method", simulate_flags.method, "aggregation method")
        ->check(CLI::IsMember({"fedavg", "flora"}));
    simulate->add_option("--task", simulate_flags.task, "training task")
        ->check(CLI::IsMember({"synthetic", "corpus"}));
    simulate->add_option("--seed", simulate_flags.seed, "run seed")->envname("FEDXLAT_SEED");
    simulate->add_option("--vocab", simulate_flags.vocab, "vocabulary size");
    simulate->add_option("--subset", simulate_flags.subset, "tokens per client subset");
    simulate->add_option("--seq-len", simulate_flags.seq_len, "sequence length");
    simulate->add_option("--samples", simulate_flags.samples, "training samples per client");
    simulate->add_option("--test-samples", simulate_flags.test_samples, "test sequences");
    simulate->add_option("--rank", simulate_flags.rank, "adapter rank");
    simulate->add_option("--alpha", simulate_flags.alpha, "adapter alpha");
    simulate->add_option("--corpus", simulate_flags.corpus_path, "corpus JSONL (corpus task)");
    simulate->add_option("--ratio", simulate_flags.ratio, "per-client counts (corpus task)");
    simulate->add_option("--by-project", simulate_flags.by_project,
                         "per-client project groups (corpus task)");
    simulate->add_option("--test-fraction", simulate_flags.test_fraction,
                         "held-out fraction (corpus task)");

    EvaluateFlags evaluate_flags;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score candidates against references");
    evaluate->add_option("--candidates", evaluate_flags.candidates_path, "candidate JSONL/text")
        ->required();
    evaluate->add_option("--references", evaluate_flags.references_path, "reference JSONL/text")
        ->required();
    evaluate->add_option("--language", evaluate_flags.language, "snippet language")
        ->check(CLI::IsMember({"java", "csharp", "toy"}));
    evaluate->add_option("--out", evaluate_flags.out_dir, "output directory");

    StatsFlags stats_flags;
    CLI::App* stats = app.add_subcommand("stats", "Nonparametric significance tests");
    stats->add_option("--test", stats_flags.test, "test name")
        ->check(CLI::IsMember({"mannwhitney", "wilcoxon"}));
    stats->add_option("--input", stats_flags.input_path,
                      "JSON file: {\"x\":[],\"y\":[]} or {\"pairs\":[[a,b],...]}")
        ->required();
    stats->add_option("--out", stats_flags.out_dir, "output directory");

    ServeFlags serve_flags;
    CLI::App* serve = app.add_subcommand("serve", "Run the federation coordinator server");
    serve->add_option("--host", serve_flags.host, "bind host");
    serve->add_option("--port", serve_flags.port, "bind port (0 picks a free port)");
    CLI::Option* token_seed =
        serve->add_option("--token-seed", serve_flags.seed, "deterministic token stream seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (partition->parsed()) return cmd_partition(partition_flags);
        if (simulate->parsed()) return cmd_simulate(simulate_flags);
        if (evaluate->parsed()) return cmd_evaluate(evaluate_flags);
        if (stats->parsed()) return cmd_stats(stats_flags);
        if (serve->parsed()) {
            serve_flags.random_tokens = token_seed->count() == 0;
            return cmd_serve(serve_flags);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
