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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "params.hpp"
#include "pattern.hpp"
#include "rng.hpp"
#include "statevector.hpp"
#include "threat.hpp"
#include "transport.hpp"

namespace vbqc::rounds {

/// A qubit in flight. Server logic can hand it to the register but never
/// look inside.
class QubitHandle {
public:
    Vertex vertex() const { return vertex_; }

private:
    friend class Channel;
    friend class ServerEndpoint;
    Vertex vertex_ = 0;
    std::array<sv::Complex, 2> amplitudes_{};
};

/// The simulated quantum link. It is the only component that reads the
/// PrepSpec on a PrepQubit frame; it applies the honest noise model in the
/// preparation frame and hands the server an opaque qubit.
class Channel {
public:
    Channel(threat::NoiseModel noise, std::size_t vertex_count, const Rng &trial);
    QubitHandle deliver(const wire::PrepQubit &message, std::uint32_t attempt);

private:
    threat::NoiseModel noise_;
    std::size_t vertex_count_;
    Rng trial_;
    std::uint32_t round_ = UINT32_MAX, attempt_ = UINT32_MAX;
    std::vector<sv::Pauli> paulis_;
    Rng rng_;
};

/// What the server can record: every frame it sees, grouped by round and
/// attempt. Built identically from live traffic or from a wire log.
class ServerView {
public:
    struct AttemptRecord {
        std::size_t preps = 0;
        bool entangled = false;
        std::vector<std::pair<Vertex, std::uint8_t>> deltas;
        std::vector<std::pair<Vertex, Bit>> outcomes;
        std::string end = "open";  // complete | client_redo | server_redo
    };
    struct RoundRecord {
        std::uint32_t round = 0;
        std::vector<AttemptRecord> attempts;
    };

    void observe(wire::Direction direction, const wire::Message &message);
    static ServerView from_log(const wire::WireLog &log);

    const std::vector<RoundRecord> &rounds() const { return rounds_; }
    const std::string &final_message() const { return final_; }
    /// Schema-1 JSON lines.
    std::string to_jsonl() const;

private:
    AttemptRecord &current(std::uint32_t round);

    std::vector<RoundRecord> rounds_;
    std::map<std::uint32_t, std::size_t> index_;
    std::string final_;
};

/// Server logic: entangles, measures as instructed, and lets the scripted
/// adversary act at the interception points.
class ServerEndpoint final : public wire::Endpoint {
public:
    ServerEndpoint(const pattern::Graph &graph, const threat::ThreatSpec &threat, const ProtocolParams &params,
                   const pattern::MeasurementPattern &pattern, const Rng &trial, ServerView *view = nullptr);

    std::optional<wire::Message> handle(const wire::Message &message) override;

    bool finished() const { return finished_; }

private:
    void begin_attempt(std::uint32_t round);
    void reset_round();
    void apply_stage(threat::Stage stage, std::optional<Vertex> only, std::optional<double> delta);
    bool redo_now(std::size_t point) const;
    std::optional<wire::Message> reply(wire::Message m);

    const pattern::Graph &graph_;
    threat::AttackScript attack_;
    std::optional<threat::ServerRedo> redo_;
    Rng trial_;
    Channel channel_;
    ServerView *view_;

    std::map<std::uint32_t, std::uint32_t> attempts_;
    std::optional<std::uint32_t> round_;
    sv::PureState state_;
    std::size_t received_ = 0;
    bool entangled_ = false;
    std::size_t measured_ = 0;
    std::vector<std::optional<Bit>> reported_;
    std::vector<threat::Directive> directives_;
    Rng measure_rng_;
    bool finished_ = false;
};

/// Stream of the server device for (round, attempt).
Rng server_stream(const Rng &trial, std::uint32_t round, std::uint32_t attempt);

}  // namespace vbqc::rounds
