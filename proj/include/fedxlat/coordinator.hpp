// Copyright (c) 2026 the fedxlat authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fedxlat/aggregation.hpp"
#include "fedxlat/federation.hpp"

#include "json.hpp"

namespace fedxlat {

// Session-wide contract fixed at creation: what every client must submit per
// round, how submissions are aggregated, and when a round gives up.
struct SessionManifest {
    ShapeManifest shapes;
    AggregationConfig aggregation;
    std::size_t client_count = 2;
    std::size_t rounds = 1;
    double timeout_seconds = 600.0;
};

enum class SessionPhase { Setup, Running, Completed, Aborted };
enum class RoundStatus { Collecting, Aggregated, Aborted };

const char* to_string(SessionPhase phase);
const char* to_string(RoundStatus status);

enum class SubmitStatus {
    Accepted,      // stored; aggregation may have completed the round
    Rejected,      // failed a gate; the client may submit a corrected adapter
    Conflict,      // duplicate accepted submission, or session not collecting
    StaleRound,    // round is not the session's current round
    Unauthorized,  // bad or missing token
    NotFound,      // unknown session or client
};

struct SubmitResult {
    SubmitStatus status = SubmitStatus::NotFound;
    std::string reason;  // machine-readable, e.g. "checksum_mismatch", "non_finite"
    std::string detail;  // human-readable context (slot name, expected value)
};

enum class AggregateStatus { Ready, Pending, Gone, NotFound };

struct AggregateResult {
    AggregateStatus status = AggregateStatus::NotFound;
    std::string bytes;     // FLAD container when Ready
    std::string checksum;  // SHA-256 of bytes when Ready
};

struct RegisterResult {
    bool ok = false;
    std::string error;  // machine-readable when !ok
    std::string client_id;
    std::string token;
};

// Transport-free coordinator state machine. All operations are serialized by
// one mutex; aggregation runs inside it on the k-th accepted submission, so a
// round aggregates exactly once no matter how submissions race. Time is
// injected so round timeouts are testable; timeouts are evaluated lazily on
// the next operation that touches the session.
class CoordinatorCore {
  public:
    using Clock = std::function<double()>;

    explicit CoordinatorCore(std::uint64_t token_seed, Clock clock = nullptr);
    CoordinatorCore();

    // Returns the new session id. Throws ArgumentError on a bad manifest.
    std::string create_session(const SessionManifest& manifest);

    RegisterResult register_client(const std::string& session_id, const std::string& client_name);

    // Gates in order: token, session phase, round, duplicate, declared
    // checksum, FLAD parse, manifest validation. A submission that fails any
    // gate is never stored and never reaches the aggregator. Checksum and
    // parse failures are transport-level: the client may retry the round.
    // A manifest violation means the client produced an untrustworthy
    // adapter, and with an all-clients quorum the round can never complete,
    // so it aborts the round (and with it the session).
    SubmitResult submit_adapter(const std::string& session_id, const std::string& client_id,
                                const std::string& token, std::size_t round,
                                const std::string& bytes, const std::string& declared_checksum);

    // Ready once the round aggregated; Pending while collecting; Gone after
    // an abort. Rounds that do not exist yet are NotFound.
    AggregateResult get_aggregate(const std::string& session_id, std::size_t round);

    // JSON snapshot of the session: phase, manifest echo, clients, and the
    // per-round submission map. Tokens never appear. Empty on unknown id.
    nlohmann::json status(const std::string& session_id);

  private:
    struct Submission {
        std::string checksum;
        std::string state;  // "accepted" or "rejected:<reason>"
    };

    struct RoundState {
        RoundStatus status = RoundStatus::Collecting;
        std::map<std::string, Submission> submissions;       // client_id -> last outcome
        std::map<std::size_t, AdapterSet> accepted;          // client index -> parsed set
        std::string aggregate_bytes;
        std::string aggregate_checksum;
        double deadline = 0.0;
    };

    struct Session {
        SessionManifest manifest;
        SessionPhase phase = SessionPhase::Setup;
        std::vector<std::string> client_names;  // index == client index
        std::vector<std::string> tokens;
        std::size_t current_round = 0;          // 1-based once Running
        std::map<std::size_t, RoundState> rounds;
    };

    Session* find_session(const std::string& session_id);
    void expire_if_due(Session& session);
    void start_round(Session& session, std::size_t round);
    std::string fresh_token();

    std::mutex mutex_;
    Clock clock_;
    std::mt19937_64 token_rng_;
    std::map<std::string, Session> sessions_;
    std::size_t next_session_ = 0;
};

// HTTP facade over CoordinatorCore:
//   POST /v1/sessions                                   manifest JSON -> {session_id}
//   POST /v1/sessions/{s}/register                      {client_name} -> {client_id, token}
//   PUT  /v1/sessions/{s}/rounds/{r}/adapters/{c}       FLAD body + X-Checksum-SHA256
//   GET  /v1/sessions/{s}/rounds/{r}/aggregate          FLAD body | pending | gone
//   GET  /v1/sessions/{s}/status                        session JSON
// Submissions authenticate with "Authorization: Bearer <token>".
class CoordinatorServer {
  public:
    explicit CoordinatorServer(CoordinatorCore& core);
    ~CoordinatorServer();

    CoordinatorServer(const CoordinatorServer&) = delete;
    CoordinatorServer& operator=(const CoordinatorServer&) = delete;

    // Binds host:port (port 0 picks a free port) and serves on a background
    // thread. Returns false if the bind fails.
    bool start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

  private:
    struct Impl;
    CoordinatorCore& core_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = -1;
};

// Parses the JSON body of POST /v1/sessions. Throws FormatError on malformed
// input and ArgumentError on invalid values.
SessionManifest parse_session_manifest(const std::string& body);

nlohmann::json manifest_to_json(const SessionManifest& manifest);

}  // namespace fedxlat
