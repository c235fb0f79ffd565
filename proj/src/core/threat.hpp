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
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "angle.hpp"
#include "params.hpp"
#include "pattern.hpp"
#include "rng.hpp"
#include "statevector.hpp"
#include "textfile.hpp"

namespace vbqc::threat {

using sv::Pauli;

/// Server-side interception points within one round attempt.
enum class Stage : std::uint8_t { after_prep, after_entangle, before_measure };

/// Frame of a scripted Pauli. `physical` acts on the register as written.
/// `measurement` is relative to the basis the server is told to measure in:
/// X and Y exchange |+_delta> and |-_delta>, Z stabilises both. Only
/// meaningful at before_measure, where delta is known.
enum class Frame : std::uint8_t { physical, measurement };

const char *stage_name(Stage s);
const char *frame_name(Frame f);

struct Action {
    enum class Kind : std::uint8_t { pauli, unitary, wrong_angle, lie };
    Kind kind = Kind::pauli;
    Pauli pauli = Pauli::I;
    Frame frame = Frame::physical;
    sv::Matrix2 unitary{1, 0, 0, 1};
    int offset = 0;  // wrong_angle, multiples of pi/4

    static Action make_pauli(Pauli p, Frame f = Frame::physical) { return {Kind::pauli, p, f, {1, 0, 0, 1}, 0}; }
    static Action make_unitary(const sv::Matrix2 &u);  // throws Error(script) if not unitary
    static Action make_wrong_angle(int k) { return {Kind::wrong_angle, Pauli::I, Frame::physical, {1, 0, 0, 1}, k}; }
    static Action make_lie() { return {Kind::lie, Pauli::I, Frame::physical, {1, 0, 0, 1}, 0}; }
};

/// Fires only if the server already reported `bit` for `vertex` in this attempt.
struct Condition {
    Vertex vertex = 0;
    Bit bit = 0;
};

struct Directive {
    std::optional<Vertex> vertex;  // empty: a uniformly random vertex per attempt
    Stage stage = Stage::before_measure;
    Action action;
    std::optional<Condition> when;
};

enum class Selection : std::uint8_t { fixed, uniformly_random_vertex };

/// Server replies Redo(j) instead of its normal reply at `point` while the
/// attempt number is below `attempts`. point 0 replaces EntangleDone,
/// point i >= 1 replaces the Outcome of the i-th measurement.
struct ServerRedo {
    std::optional<std::set<std::uint32_t>> rounds;  // empty: every round
    std::uint32_t attempts = 1;
    std::optional<std::size_t> point;  // empty: the last measurement
    bool applies(std::uint32_t round, std::uint32_t attempt) const {
        return attempt < attempts && (!rounds || rounds->count(round));
    }
};

/// Client sends Redo(j) after `after_preps` of its PrepQubit messages while
/// the attempt number is below `attempts`.
struct ClientRedo {
    std::optional<std::set<std::uint32_t>> rounds;
    std::uint32_t attempts = 1;
    std::size_t after_preps = 0;
    bool applies(std::uint32_t round, std::uint32_t attempt) const {
        return attempt < attempts && (!rounds || rounds->count(round));
    }
};

struct AttackScript {
    std::map<std::uint32_t, std::vector<Directive>> rounds;
    std::vector<Directive> every_round;
    Selection selection = Selection::fixed;

    bool empty() const { return rounds.empty() && every_round.empty(); }
    /// Concrete directives for one attempt: random vertices resolved from `rng`
    /// (also every vertex when selection is uniformly_random_vertex).
    std::vector<Directive> resolve(std::uint32_t round, std::size_t vertex_count, Rng &rng) const;
    /// Throws Error(script) for out-of-range vertices or frames used off-stage.
    void validate(std::size_t vertex_count) const;
};

struct PauliRates {
    double px = 0, py = 0, pz = 0;
    double flip() const { return px + py; }
    bool zero() const { return px == 0 && py == 0 && pz == 0; }
    friend bool operator==(const PauliRates &, const PauliRates &) = default;
};

/// Honest device noise. Pauli channels act in the preparation frame, i.e. on
/// the state the client intended to send: X and Y turn |+_theta> into
/// |-_theta> and |d> into |1-d>; Z changes neither. `damping` is the one
/// non-Pauli channel (amplitude damping in the computational basis).
struct NoiseModel {
    enum class Kind : std::uint8_t { none, per_qubit_pauli, per_round_channel, damping };
    enum class RoundDependence : std::uint8_t { fixed, schedule };

    Kind kind = Kind::none;
    PauliRates rates;                       // per_qubit_pauli
    std::map<Vertex, PauliRates> per_vertex;  // per_round_channel; missing vertices use `rates`
    double gamma = 0;                       // damping
    RoundDependence round_dependence = RoundDependence::fixed;
    std::map<std::uint32_t, PauliRates> schedule;  // overrides every vertex of that round

    bool is_pauli() const { return kind != Kind::damping; }
    PauliRates rates_for(std::uint32_t round, Vertex v) const;
    /// Throws Error(input) on probabilities outside [0,1] or px+py+pz > 1.
    void validate() const;
};

/// Independent per-qubit Pauli draws for one round. Non-Pauli models throw
/// Error(unsupported_model).
std::vector<std::pair<Vertex, Pauli>> instantiate_noise(const NoiseModel &model, std::uint32_t round,
                                                        std::size_t vertex_count, Rng &rng);

/// Exact probability that a test round with trap colour `colour` has at
/// least one failing trap under `model` at `round`.
double trap_failure_probability(const NoiseModel &model, const pattern::MeasurementPattern &pattern,
                                std::size_t colour, std::uint32_t round = 0);

struct TrapFailureSummary {
    std::vector<double> per_colour;
    double min = 0, max = 0, mean = 0;  // mean: colour drawn uniformly
};
TrapFailureSummary trap_failure_summary(const NoiseModel &model, const pattern::MeasurementPattern &pattern,
                                        std::uint32_t round = 0);

/// E_m: rounds 0..m-1 each get one `pauli` in the measurement frame on a
/// uniformly chosen vertex. Throws Error(input) if m > n.
AttackScript em_attack_build(std::uint32_t m, const ProtocolParams &params,
                             const pattern::MeasurementPattern &pattern, Pauli pauli, Rng &rng);

/// Everything a threat file can say.
struct ThreatSpec {
    NoiseModel noise;
    AttackScript attack;
    struct Em {
        std::uint32_t m = 0;
        Pauli pauli = Pauli::X;
    };
    std::optional<Em> em;  // built per trial
    std::optional<ServerRedo> server_redo;
    std::optional<ClientRedo> client_redo;

    bool honest() const {
        return noise.kind == NoiseModel::Kind::none && attack.empty() && !em && !server_redo;
    }
};

/// Applies one threat line; returns false for keywords it does not own.
bool apply_threat_line(const text::Line &line, ThreatSpec &spec);
ThreatSpec parse_threat(const std::string &text);
ThreatSpec load_threat(const std::string &path);
std::string format_threat(const ThreatSpec &spec);

}  // namespace vbqc::threat
