// Copyright 2026 The vbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "params.hpp"
#include "pattern.hpp"
#include "rng.hpp"
#include "threat.hpp"
#include "transport.hpp"
#include "ubqc.hpp"

namespace vbqc::rounds {

using ubqc::RoundKind;
using ubqc::RoundSecrets;

struct RoundPlan {
    std::uint32_t index = 0;
    std::uint32_t attempt = 0;
    RoundKind kind = RoundKind::computation;
    RoundSecrets secrets;
};

enum class Requester : std::uint8_t { client, server };

/// One try at a round. Attempts cut short by Redo are archived.
struct Attempt {
    RoundPlan plan;
    std::vector<std::optional<Angle>> deltas;  // by vertex
    std::vector<std::optional<Bit>> outcomes;  // raw reported b, by vertex
    std::size_t preps_sent = 0;
    std::optional<Requester> redo_by;
};

struct RoundTranscript : Attempt {
    std::uint32_t redo_count = 0;
    std::vector<Attempt> archived;
    Bit output_flip = 0;  // injected inherent error (computation rounds)
    std::optional<std::uint64_t> output;  // computation rounds
    std::optional<bool> passed;           // test rounds
};

/// (C, T): computation and test round indices, each sorted.
struct Partition {
    std::vector<std::uint32_t> computation;
    std::vector<std::uint32_t> test;
};

/// Uniform over all C(n, d) choices of the computation set.
Partition partition_rounds(const ProtocolParams &params, Rng &rng);

/// Client secrets stream for (round, attempt).
Rng client_stream(const Rng &trial, std::uint32_t round, std::uint32_t attempt);

RoundPlan make_plan(std::uint32_t index, std::uint32_t attempt, RoundKind kind,
                    const pattern::MeasurementPattern &pattern, std::span<const Bit> input_bits, Rng &rng);

/// Archives the current attempt and installs a fresh plan (same index and
/// kind, new secrets from `fresh`). The client may ask only before its last
/// qubit is sent; the server any time before the round's last outcome.
/// Throws Error(protocol_order) outside those windows.
const RoundPlan &handle_redo(RoundTranscript &transcript, Requester requester,
                             const pattern::MeasurementPattern &pattern, Rng &fresh);

/// Recomputes `output` or `passed` from outcomes and secrets.
void evaluate_round(RoundTranscript &transcript, const pattern::MeasurementPattern &pattern);

struct Verdict {
    enum class Status : std::uint8_t { ok, abort };
    enum class Reason : std::uint8_t { none, too_many_failed_tests, no_majority };
    Status status = Status::abort;
    Reason reason = Reason::none;
    std::uint64_t output = 0;  // meaningful when ok
    std::uint32_t c_fail = 0;
    std::map<std::uint64_t, std::uint32_t> tallies;

    bool ok() const { return status == Status::ok; }
    friend bool operator==(const Verdict &, const Verdict &) = default;
};

const char *reason_name(Verdict::Reason r);

/// c_fail from the test rounds, abort iff c_fail >= w, else majority over
/// the computation outputs (strictly more than d/2). Outcomes are re-checked
/// against the secrets; stored results and archived attempts are ignored.
Verdict verify_and_vote(std::span<const RoundTranscript> transcripts, const ProtocolParams &params,
                        const pattern::MeasurementPattern &pattern);

struct ClientOptions {
    double flip_probability = 0;  // inherent error injected per computation round
    std::optional<threat::ClientRedo> redo;
};

struct ProtocolRun {
    Verdict verdict;
    std::vector<RoundTranscript> transcripts;
    Partition partition;
};

/// Client state machine for one session.
class Client {
public:
    Client(const pattern::MeasurementPattern &pattern, const ProtocolParams &params, std::vector<Bit> input_bits,
           const Rng &trial, ClientOptions options = {});

    RoundTranscript run_round(std::uint32_t index, RoundKind kind, wire::Transport &transport);
    /// All n rounds in order, then verification and the closing Ok/Abort.
    ProtocolRun run(wire::Transport &transport);

private:
    const pattern::MeasurementPattern &pattern_;
    ProtocolParams params_;
    std::vector<Bit> input_bits_;
    Rng trial_;
    ClientOptions options_;
    std::uint64_t output_mask_ = 0;
};

class ServerView;

struct SessionHooks {
    wire::WireLog *log = nullptr;
    ServerView *server_view = nullptr;
};

/// Runs a whole session against an in-process server built from `threat`.
ProtocolRun run_protocol(const ProtocolParams &params, const pattern::MeasurementPattern &pattern,
                         std::span<const Bit> input_bits, const threat::ThreatSpec &threat, const Rng &trial,
                         double flip_probability = 0, SessionHooks hooks = {});

}  // namespace vbqc::rounds
