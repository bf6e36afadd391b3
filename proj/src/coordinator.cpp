// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#include "fedxlat/coordinator.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <utility>

#include "fedxlat/errors.hpp"
#include "fedxlat/flad.hpp"

#include "httplib.h"

namespace fedxlat {

namespace {

double steady_seconds() {
    const auto tp = std::chrono::steady_clock::now().time_since_epoch();
    return std::chrono::duration<double>(tp).count();
}

}  // namespace

const char* to_string(SessionPhase phase) {
    switch (phase) {
        case SessionPhase::Setup: return "setup";
        case SessionPhase::Running: return "running";
        case SessionPhase::Completed: return "completed";
        case SessionPhase::Aborted: return "aborted";
    }
    return "unknown";
}

const char* to_string(RoundStatus status) {
    switch (status) {
        case RoundStatus::Collecting: return "collecting";
        case RoundStatus::Aggregated: return "aggregated";
        case RoundStatus::Aborted: return "aborted";
    }
    return "unknown";
}

CoordinatorCore::CoordinatorCore(std::uint64_t token_seed, Clock clock)
    : clock_(clock ? std::move(clock) : steady_seconds), token_rng_(token_seed) {}

CoordinatorCore::CoordinatorCore() : CoordinatorCore(std::random_device{}(), nullptr) {}

std::string CoordinatorCore::create_session(const SessionManifest& manifest) {
    if (manifest.client_count == 0) {
        throw ArgumentError("coordinator: client_count must be positive");
    }
    if (manifest.rounds == 0) {
        throw ArgumentError("coordinator: rounds must be positive");
    }
    if (manifest.shapes.slots.empty()) {
        throw ArgumentError("coordinator: manifest needs at least one slot");
    }
    if (manifest.shapes.rank == 0) {
        throw ArgumentError("coordinator: rank must be positive");
    }
    if (manifest.timeout_seconds <= 0.0) {
        throw ArgumentError("coordinator: timeout must be positive");
    }
    if (manifest.aggregation.client_weights &&
        manifest.aggregation.client_weights->size() != manifest.client_count) {
        throw ArgumentError("coordinator: weight count does not match client_count");
    }

    std::lock_guard<std::mutex> lock(mutex_);
    std::string id = "s" + std::to_string(next_session_++);
    Session session;
    session.manifest = manifest;
    sessions_.emplace(id, std::move(session));
    return id;
}

CoordinatorCore::Session* CoordinatorCore::find_session(const std::string& session_id) {
    const auto it = sessions_.find(session_id);
    return it == sessions_.end() ? nullptr : &it->second;
}

void CoordinatorCore::start_round(Session& session, std::size_t round) {
    session.current_round = round;
    RoundState state;
    state.deadline = clock_() + session.manifest.timeout_seconds;
    session.rounds[round] = std::move(state);
}

// Quorum policy is "all clients", so a round that outlives its deadline with
// any submission missing can never aggregate; the round and session abort.
void CoordinatorCore::expire_if_due(Session& session) {
    if (session.phase != SessionPhase::Running) return;
    RoundState& round = session.rounds[session.current_round];
    if (round.status == RoundStatus::Collecting && clock_() > round.deadline) {
        round.status = RoundStatus::Aborted;
        session.phase = SessionPhase::Aborted;
    }
}

std::string CoordinatorCore::fresh_token() {
    char buffer[33];
    std::snprintf(buffer, sizeof buffer, "%016llx%016llx",
                  static_cast<unsigned long long>(token_rng_()),
                  static_cast<unsigned long long>(token_rng_()));
    return buffer;
}

RegisterResult CoordinatorCore::register_client(const std::string& session_id,
                                                const std::string& client_name) {
    std::lock_guard<std::mutex> lock(mutex_);
    Session* session = find_session(session_id);
    if (!session) return {false, "unknown_session", "", ""};
    if (session->phase != SessionPhase::Setup) return {false, "registration_closed", "", ""};
    for (const std::string& name : session->client_names) {
        if (name == client_name) return {false, "duplicate_name", "", ""};
    }

    const std::size_t index = session->client_names.size();
    session->client_names.push_back(client_name);
    session->tokens.push_back(fresh_token());
    RegisterResult result{true, "", "c" + std::to_string(index), session->tokens.back()};
    if (session->client_names.size() == session->manifest.client_count) {
        session->phase = SessionPhase::Running;
        start_round(*session, 1);
    }
    return result;
}

SubmitResult CoordinatorCore::submit_adapter(const std::string& session_id,
                                             const std::string& client_id,
                                             const std::string& token, std::size_t round,
                                             const std::string& bytes,
                                             const std::string& declared_checksum) {
    std::lock_guard<std::mutex> lock(mutex_);
    Session* session = find_session(session_id);
    if (!session) return {SubmitStatus::NotFound, "unknown_session"};

    std::size_t client_index = session->client_names.size();
    if (client_id.size() > 1 && client_id[0] == 'c') {
        std::size_t parsed = 0;
        for (char c : client_id.substr(1)) {
            if (c < '0' || c > '9') { parsed = session->client_names.size(); break; }
            parsed = parsed * 10 + static_cast<std::size_t>(c - '0');
        }
        client_index = parsed;
    }
    if (client_index >= session->client_names.size()) {
        return {SubmitStatus::NotFound, "unknown_client"};
    }
    if (session->tokens[client_index] != token) {
        return {SubmitStatus::Unauthorized, "bad_token"};
    }

    expire_if_due(*session);
    if (session->phase == SessionPhase::Setup) {
        return {SubmitStatus::Conflict, "registration_incomplete"};
    }
    if (session->phase == SessionPhase::Completed) {
        return {SubmitStatus::Conflict, "session_complete"};
    }
    if (session->phase == SessionPhase::Aborted) {
        return {SubmitStatus::Conflict, "session_aborted"};
    }
    if (round != session->current_round) {
        return {SubmitStatus::StaleRound, "wrong_round"};
    }

    RoundState& state = session->rounds[round];
    if (state.accepted.count(client_index) > 0) {
        return {SubmitStatus::Conflict, "duplicate_submission"};
    }

    const auto reject = [&](const std::string& reason, const std::string& detail,
                            bool abort_round) -> SubmitResult {
        state.submissions[client_id] = {declared_checksum, "rejected:" + reason};
        if (abort_round) {
            state.status = RoundStatus::Aborted;
            session->phase = SessionPhase::Aborted;
        }
        return {SubmitStatus::Rejected, reason, detail};
    };

    if (sha256_hex(bytes) != declared_checksum) {
        return reject("checksum_mismatch", "body hash differs from X-Checksum-SHA256", false);
    }
    AdapterSet submitted;
    try {
        submitted = decode_adapter_set(bytes);
    } catch (const Error& error) {
        return reject("parse_error", error.what(), false);
    }
    if (const auto rejection = validate_submission(submitted, session->manifest.shapes)) {
        return reject(to_string(rejection->reason),
                      "slot '" + rejection->slot + "': " + rejection->detail, true);
    }
    // Aggregation requires one common alpha; the manifest pins it.
    for (const auto& [name, adapter] : submitted.entries) {
        if (adapter.alpha != session->manifest.shapes.alpha) {
            return reject("alpha", "slot '" + name + "' does not match the manifest alpha", true);
        }
    }

    state.submissions[client_id] = {declared_checksum, "accepted"};
    state.accepted.emplace(client_index, std::move(submitted));

    if (state.accepted.size() == session->manifest.client_count) {
        std::vector<AdapterSet> ordered;
        ordered.reserve(state.accepted.size());
        for (auto& [index, set] : state.accepted) {
            (void)index;
            ordered.push_back(std::move(set));
        }
        const AdapterSet aggregated = aggregate_set(ordered, session->manifest.aggregation);
        state.aggregate_bytes = encode_adapter_set(aggregated);
        state.aggregate_checksum = sha256_hex(state.aggregate_bytes);
        state.status = RoundStatus::Aggregated;
        if (round == session->manifest.rounds) {
            session->phase = SessionPhase::Completed;
        } else {
            start_round(*session, round + 1);
        }
    }
    return {SubmitStatus::Accepted, ""};
}

AggregateResult CoordinatorCore::get_aggregate(const std::string& session_id, std::size_t round) {
    std::lock_guard<std::mutex> lock(mutex_);
    Session* session = find_session(session_id);
    if (!session) return {AggregateStatus::NotFound, "", ""};
    expire_if_due(*session);

    const auto it = session->rounds.find(round);
    if (it == session->rounds.end()) return {AggregateStatus::NotFound, "", ""};
    const RoundState& state = it->second;
    switch (state.status) {
        case RoundStatus::Collecting: return {AggregateStatus::Pending, "", ""};
        case RoundStatus::Aborted: return {AggregateStatus::Gone, "", ""};
        case RoundStatus::Aggregated: break;
    }
    return {AggregateStatus::Ready, state.aggregate_bytes, state.aggregate_checksum};
}

nlohmann::json CoordinatorCore::status(const std::string& session_id) {
    std::lock_guard<std::mutex> lock(mutex_);
    Session* session = find_session(session_id);
    if (!session) return nlohmann::json();
    expire_if_due(*session);

    nlohmann::json out;
    out["session_id"] = session_id;
    out["phase"] = to_string(session->phase);
    out["manifest"] = manifest_to_json(session->manifest);
    nlohmann::json clients = nlohmann::json::array();
    for (std::size_t i = 0; i < session->client_names.size(); ++i) {
        clients.push_back({{"client_id", "c" + std::to_string(i)},
                           {"name", session->client_names[i]}});
    }
    out["clients"] = clients;
    out["current_round"] = session->current_round;

    nlohmann::json rounds = nlohmann::json::object();
    for (const auto& [index, state] : session->rounds) {
        nlohmann::json entry;
        entry["status"] = to_string(state.status);
        nlohmann::json submissions = nlohmann::json::object();
        for (const auto& [client, submission] : state.submissions) {
            submissions[client] = {{"checksum", submission.checksum},
                                   {"state", submission.state}};
        }
        entry["submissions"] = submissions;
        if (state.status == RoundStatus::Aggregated) {
            entry["aggregate_checksum"] = state.aggregate_checksum;
        }
        rounds[std::to_string(index)] = entry;
    }
    out["rounds"] = rounds;
    return out;
}

SessionManifest parse_session_manifest(const std::string& body) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& error) {
        throw FormatError(std::string("coordinator: manifest: ") + error.what());
    }

    SessionManifest manifest;
    try {
        for (const auto& [name, shape] : parsed.at("slots").items()) {
            manifest.shapes.slots[name] = {shape.at(0).get<std::size_t>(),
                                           shape.at(1).get<std::size_t>()};
        }
        manifest.shapes.rank = parsed.at("rank").get<std::size_t>();
        manifest.shapes.alpha = parsed.at("alpha").get<double>();
        if (parsed.contains("norm_bound")) {
            manifest.shapes.norm_bound = parsed["norm_bound"].get<double>();
        }
        manifest.aggregation.method =
            aggregation_method_from_string(parsed.at("method").get<std::string>());
        if (parsed.contains("weights")) {
            manifest.aggregation.client_weights = parsed["weights"].get<std::vector<double>>();
        }
        manifest.client_count = parsed.at("client_count").get<std::size_t>();
        manifest.aggregation.client_count = manifest.client_count;
        manifest.rounds = parsed.at("rounds").get<std::size_t>();
        if (parsed.contains("timeout_seconds")) {
            manifest.timeout_seconds = parsed["timeout_seconds"].get<double>();
        }
    } catch (const nlohmann::json::exception& error) {
        throw FormatError(std::string("coordinator: manifest: ") + error.what());
    }
    return manifest;
}

nlohmann::json manifest_to_json(const SessionManifest& manifest) {
    nlohmann::json slots = nlohmann::json::object();
    for (const auto& [name, shape] : manifest.shapes.slots) {
        slots[name] = {shape.first, shape.second};
    }
    nlohmann::json out{{"slots", slots},
                       {"rank", manifest.shapes.rank},
                       {"alpha", manifest.shapes.alpha},
                       {"norm_bound", manifest.shapes.norm_bound},
                       {"method", to_string(manifest.aggregation.method)},
                       {"client_count", manifest.client_count},
                       {"rounds", manifest.rounds},
                       {"timeout_seconds", manifest.timeout_seconds}};
    if (manifest.aggregation.client_weights) {
        out["weights"] = *manifest.aggregation.client_weights;
    }
    return out;
}

struct CoordinatorServer::Impl {
    httplib::Server server;
};

namespace {

std::string bearer_token(const httplib::Request& request) {
    const std::string header = request.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (header.rfind(prefix, 0) != 0) return "";
    return header.substr(prefix.size());
}

bool parse_round(const std::string& text, std::size_t& round) {
    if (text.empty()) return false;
    std::size_t value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<std::size_t>(c - '0');
    }
    round = value;
    return true;
}

void send_json(httplib::Response& response, int status, const nlohmann::json& body) {
    response.status = status;
    response.set_content(body.dump(), "application/json");
}

}  // namespace

CoordinatorServer::CoordinatorServer(CoordinatorCore& core)
    : core_(core), impl_(new Impl) {
    httplib::Server& server = impl_->server;

    server.Post("/v1/sessions", [this](const httplib::Request& request,
                                       httplib::Response& response) {
        try {
            const SessionManifest manifest = parse_session_manifest(request.body);
            const std::string id = core_.create_session(manifest);
            send_json(response, 201, {{"session_id", id}});
        } catch (const Error& error) {
            send_json(response, 400, {{"error", error.what()}});
        }
    });

    server.Post(R"(/v1/sessions/([^/]+)/register)", [this](const httplib::Request& request,
                                                           httplib::Response& response) {
        std::string name;
        try {
            name = nlohmann::json::parse(request.body).at("client_name").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            send_json(response, 400, {{"error", "body needs a client_name field"}});
            return;
        }
        const RegisterResult result = core_.register_client(request.matches[1], name);
        if (!result.ok) {
            const int status = result.error == "unknown_session" ? 404 : 409;
            send_json(response, status, {{"error", result.error}});
            return;
        }
        send_json(response, 200, {{"client_id", result.client_id}, {"token", result.token}});
    });

    server.Put(R"(/v1/sessions/([^/]+)/rounds/(\d+)/adapters/([^/]+))",
               [this](const httplib::Request& request, httplib::Response& response) {
        std::size_t round = 0;
        if (!parse_round(request.matches[2], round)) {
            send_json(response, 404, {{"error", "bad_round"}});
            return;
        }
        const std::string checksum = request.get_header_value("X-Checksum-SHA256");
        if (checksum.empty()) {
            send_json(response, 422, {{"status", "rejected"}, {"reason", "missing_checksum"}});
            return;
        }
        const SubmitResult result = core_.submit_adapter(
            request.matches[1], request.matches[3], bearer_token(request), round, request.body,
            checksum);
        switch (result.status) {
            case SubmitStatus::Accepted:
                send_json(response, 202, {{"status", "accepted"}});
                return;
            case SubmitStatus::Rejected:
                send_json(response, 422,
                          {{"status", "rejected"},
                           {"reason", result.reason},
                           {"detail", result.detail}});
                return;
            case SubmitStatus::Conflict:
            case SubmitStatus::StaleRound:
                send_json(response, 409, {{"status", "conflict"}, {"reason", result.reason}});
                return;
            case SubmitStatus::Unauthorized:
                send_json(response, 401, {{"error", result.reason}});
                return;
            case SubmitStatus::NotFound:
                break;
        }
        send_json(response, 404, {{"error", result.reason}});
    });

    server.Get(R"(/v1/sessions/([^/]+)/rounds/(\d+)/aggregate)",
               [this](const httplib::Request& request, httplib::Response& response) {
        std::size_t round = 0;
        if (!parse_round(request.matches[2], round)) {
            send_json(response, 404, {{"error", "bad_round"}});
            return;
        }
        const AggregateResult result = core_.get_aggregate(request.matches[1], round);
        switch (result.status) {
            case AggregateStatus::Ready:
                response.status = 200;
                response.set_header("X-Checksum-SHA256", result.checksum);
                response.set_content(result.bytes, "application/octet-stream");
                return;
            case AggregateStatus::Pending:
                send_json(response, 202, {{"status", "pending"}});
                return;
            case AggregateStatus::Gone:
                send_json(response, 410, {{"status", "gone"}});
                return;
            case AggregateStatus::NotFound:
                break;
        }
        send_json(response, 404, {{"error", "unknown_round"}});
    });

    server.Get(R"(/v1/sessions/([^/]+)/status)", [this](const httplib::Request& request,
                                                        httplib::Response& response) {
        const nlohmann::json body = core_.status(request.matches[1]);
        if (body.is_null()) {
            send_json(response, 404, {{"error", "unknown_session"}});
            return;
        }
        send_json(response, 200, body);
    });
}

CoordinatorServer::~CoordinatorServer() { stop(); }

bool CoordinatorServer::start(const std::string& host, int port) {
    httplib::Server& server = impl_->server;
    if (port == 0) {
        port_ = server.bind_to_any_port(host);
        if (port_ < 0) return false;
    } else {
        if (!server.bind_to_port(host, port)) return false;
        port_ = port;
    }
    thread_ = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return true;
}

void CoordinatorServer::stop() {
    if (thread_.joinable()) {
        impl_->server.stop();
        thread_.join();
    }
}

}  // namespace fedxlat
