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

#include "server.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"
#include "json.hpp"

namespace vbqc::rounds {

namespace {

constexpr std::uint64_t kEmStream = 0xe3;

sv::PrepSpec apply_prep_frame(sv::PrepSpec spec, sv::Pauli p) {
    if (p != sv::Pauli::X && p != sv::Pauli::Y) return spec;
    if (spec.kind == sv::PrepSpec::Kind::dummy) return sv::PrepSpec::dummy(spec.value ^ 1);
    return sv::PrepSpec::plus(Angle(spec.value) + Angle::pi());
}

}  // namespace

Rng server_stream(const Rng &trial, std::uint32_t round, std::uint32_t attempt) {
    return trial.split(streams::server).split(round).split(attempt);
}

Channel::Channel(threat::NoiseModel noise, std::size_t vertex_count, const Rng &trial)
    : noise_(std::move(noise)), vertex_count_(vertex_count), trial_(trial) {}

QubitHandle Channel::deliver(const wire::PrepQubit &message, std::uint32_t attempt) {
    if (message.vertex >= vertex_count_) {
        fail(ErrorCode::protocol_order, "qubit for unknown vertex " + std::to_string(message.vertex));
    }
    if (message.round != round_ || attempt != attempt_) {
        round_ = message.round;
        attempt_ = attempt;
        rng_ = trial_.split(streams::channel).split(round_).split(attempt_);
        paulis_.assign(vertex_count_, sv::Pauli::I);
        if (noise_.is_pauli()) {
            for (auto [v, p] : threat::instantiate_noise(noise_, round_, vertex_count_, rng_)) paulis_[v] = p;
        }
    }
    QubitHandle q;
    q.vertex_ = message.vertex;
    q.amplitudes_ = apply_prep_frame(message.spec, paulis_[message.vertex]).amplitudes();
    if (noise_.kind == threat::NoiseModel::Kind::damping && noise_.gamma > 0) {
        // Quantum-jump unravelling of amplitude damping on the product state.
        auto &a = q.amplitudes_;
        const double p1 = std::norm(a[1]);
        if (rng_.uniform() < noise_.gamma * p1) {
            a = {1.0, 0.0};
        } else {
            a[1] *= std::sqrt(1 - noise_.gamma);
            const double scale = 1.0 / std::sqrt(std::norm(a[0]) + std::norm(a[1]));
            a[0] *= scale;
            a[1] *= scale;
        }
    }
    return q;
}

ServerView::AttemptRecord &ServerView::current(std::uint32_t round) {
    auto it = index_.find(round);
    if (it == index_.end()) {
        it = index_.emplace(round, rounds_.size()).first;
        rounds_.push_back({round, {AttemptRecord{}}});
    }
    return rounds_[it->second].attempts.back();
}

void ServerView::observe(wire::Direction direction, const wire::Message &message) {
    using namespace wire;
    const bool c2s = direction == Direction::client_to_server;
    std::visit(
        [&](const auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, PrepQubit>) {
                auto *a = &current(m.round);
                if (a->end != "open") {
                    rounds_[index_[m.round]].attempts.emplace_back();
                    a = &rounds_[index_[m.round]].attempts.back();
                }
                ++a->preps;
            } else if constexpr (std::is_same_v<T, EntangleDone>) {
                current(m.round).entangled = true;
            } else if constexpr (std::is_same_v<T, MeasureInstruction>) {
                current(m.round).deltas.emplace_back(m.vertex, m.delta.k());
            } else if constexpr (std::is_same_v<T, Outcome>) {
                auto &a = current(m.round);
                a.outcomes.emplace_back(m.vertex, m.bit);
                if (a.outcomes.size() == a.preps) a.end = "complete";
            } else if constexpr (std::is_same_v<T, Redo>) {
                auto &a = current(m.round);
                a.end = c2s ? "client_redo" : "server_redo";
            } else if constexpr (std::is_same_v<T, Ok>) {
                final_ = "Ok";
            } else if constexpr (std::is_same_v<T, Abort>) {
                final_ = "Abort";
            }
        },
        message);
}

ServerView ServerView::from_log(const wire::WireLog &log) {
    ServerView view;
    for (const auto &e : log.entries) view.observe(e.direction, wire::decode(e.frame));
    return view;
}

std::string ServerView::to_jsonl() const {
    using nlohmann::json;
    std::string out = json{{"schema", 1}, {"view", "server"}}.dump() + "\n";
    for (const auto &r : rounds_) {
        json attempts = json::array();
        for (const auto &a : r.attempts) {
            json deltas = json::array(), outcomes = json::array();
            for (auto [v, k] : a.deltas) deltas.push_back({v, k});
            for (auto [v, b] : a.outcomes) outcomes.push_back({v, b});
            attempts.push_back({{"preps", a.preps},
                                {"entangled", a.entangled},
                                {"deltas", deltas},
                                {"outcomes", outcomes},
                                {"end", a.end}});
        }
        out += json{{"round", r.round}, {"attempts", attempts}}.dump() + "\n";
    }
    if (!final_.empty()) out += json{{"final", final_}}.dump() + "\n";
    return out;
}

ServerEndpoint::ServerEndpoint(const pattern::Graph &graph, const threat::ThreatSpec &threat,
                               const ProtocolParams &params, const pattern::MeasurementPattern &pattern,
                               const Rng &trial, ServerView *view)
    : graph_(graph),
      attack_(threat.attack),
      redo_(threat.server_redo),
      trial_(trial),
      channel_(threat.noise, graph.vertex_count(), trial),
      view_(view),
      state_(sv::kDefaultMaxQubits) {
    if (threat.em) {
        Rng rng = trial.split(streams::adversary).split(kEmStream);
        auto em = threat::em_attack_build(threat.em->m, params, pattern, threat.em->pauli, rng);
        for (auto &[j, ds] : em.rounds) {
            auto &slot = attack_.rounds[j];
            slot.insert(slot.end(), ds.begin(), ds.end());
        }
    }
    attack_.validate(graph.vertex_count());
}

void ServerEndpoint::begin_attempt(std::uint32_t round) {
    const std::uint32_t attempt = attempts_[round];
    round_ = round;
    state_ = sv::PureState(sv::kDefaultMaxQubits);
    received_ = 0;
    entangled_ = false;
    measured_ = 0;
    reported_.assign(graph_.vertex_count(), std::nullopt);
    if (attack_.empty()) {
        directives_.clear();
    } else {
        Rng adv = trial_.split(streams::adversary).split(round).split(attempt);
        directives_ = attack_.resolve(round, graph_.vertex_count(), adv);
    }
    measure_rng_ = server_stream(trial_, round, attempt);
}

void ServerEndpoint::reset_round() {
    round_.reset();
    received_ = 0;
    entangled_ = false;
    measured_ = 0;
}

void ServerEndpoint::apply_stage(threat::Stage stage, std::optional<Vertex> only, std::optional<double> delta) {
    using threat::Action;
    for (const auto &d : directives_) {
        if (d.stage != stage || (only && *d.vertex != *only)) continue;
        if (d.when && reported_.at(d.when->vertex) != std::optional<Bit>(d.when->bit)) continue;
        const Vertex v = *d.vertex;
        if (d.action.kind == Action::Kind::pauli) {
            if (d.action.frame == threat::Frame::measurement) {
                state_.apply_unitary(v, sv::conjugate_into_basis(d.action.pauli, *delta));
            } else {
                state_.apply_pauli(v, d.action.pauli);
            }
        } else if (d.action.kind == Action::Kind::unitary) {
            state_.apply_unitary(v, d.action.unitary);
        }
    }
}

bool ServerEndpoint::redo_now(std::size_t point) const {
    if (!redo_ || !redo_->applies(*round_, attempts_.at(*round_))) return false;
    return point == redo_->point.value_or(graph_.vertex_count());
}

std::optional<wire::Message> ServerEndpoint::reply(wire::Message m) {
    if (view_) view_->observe(wire::Direction::server_to_client, m);
    return m;
}

std::optional<wire::Message> ServerEndpoint::handle(const wire::Message &message) {
    using namespace wire;
    if (view_) view_->observe(Direction::client_to_server, message);
    if (finished_) fail(ErrorCode::protocol_order, "message after the session ended");
    const std::size_t n = graph_.vertex_count();

    if (const auto *m = std::get_if<PrepQubit>(&message)) {
        if (!round_) begin_attempt(m->round);
        if (*round_ != m->round) {
            fail(ErrorCode::protocol_order, "qubit for round " + std::to_string(m->round) + " while round " +
                                                std::to_string(*round_) + " is open");
        }
        if (state_.is_live(m->vertex)) {
            fail(ErrorCode::protocol_order, "vertex " + std::to_string(m->vertex) + " sent twice");
        }
        const QubitHandle q = channel_.deliver(*m, attempts_[m->round]);
        state_.add_qubit(q.vertex_, q.amplitudes_);
        if (++received_ < n) return std::nullopt;
        apply_stage(threat::Stage::after_prep, std::nullopt, std::nullopt);
        for (auto [a, b] : graph_.edges()) state_.apply_cz(a, b);
        apply_stage(threat::Stage::after_entangle, std::nullopt, std::nullopt);
        entangled_ = true;
        if (redo_now(0)) {
            const auto j = *round_;
            ++attempts_[j];
            reset_round();
            return reply(Redo{j});
        }
        return reply(EntangleDone{m->round});
    }
    if (const auto *m = std::get_if<MeasureInstruction>(&message)) {
        if (!round_ || *round_ != m->round || !entangled_ || !state_.is_live(m->vertex)) {
            fail(ErrorCode::protocol_order, "unexpected " + describe(message));
        }
        const double angle = m->delta.radians();
        apply_stage(threat::Stage::before_measure, m->vertex, angle);
        int offset = 0;
        bool lie = false;
        for (const auto &d : directives_) {
            if (d.stage != threat::Stage::before_measure || *d.vertex != m->vertex) continue;
            if (d.when && reported_.at(d.when->vertex) != std::optional<Bit>(d.when->bit)) continue;
            if (d.action.kind == threat::Action::Kind::wrong_angle) offset += d.action.offset;
            if (d.action.kind == threat::Action::Kind::lie) lie = !lie;
        }
        Bit b = state_.measure_radians(m->vertex, angle + offset * std::numbers::pi / 4, measure_rng_);
        if (lie) b ^= 1;
        reported_[m->vertex] = b;
        ++measured_;
        const auto j = *round_;
        if (redo_now(measured_)) {
            ++attempts_[j];
            reset_round();
            return reply(Redo{j});
        }
        if (measured_ == n) reset_round();
        return reply(Outcome{j, m->vertex, b});
    }
    if (const auto *m = std::get_if<Redo>(&message)) {
        if (round_ && *round_ != m->round) fail(ErrorCode::protocol_order, "Redo for a round that is not open");
        ++attempts_[m->round];
        reset_round();
        return std::nullopt;
    }
    if (std::holds_alternative<Ok>(message) || std::holds_alternative<Abort>(message)) {
        finished_ = true;
        return std::nullopt;
    }
    fail(ErrorCode::protocol_order, "client sent a server message: " + describe(message));
}

}  // namespace vbqc::rounds
