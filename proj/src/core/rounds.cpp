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

#include "rounds.hpp"

#include <algorithm>

#include "error.hpp"
#include "server.hpp"

namespace vbqc::rounds {

namespace {

constexpr std::uint64_t kPartitionStream = 0x9a27;

std::uint64_t output_mask(const pattern::MeasurementPattern &pattern) {
    const auto m = pattern.outputs.size();
    return m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1;
}

void require_complete(const Attempt &a) {
    for (std::size_t v = 0; v < a.outcomes.size(); ++v) {
        if (!a.outcomes[v]) {
            fail(ErrorCode::protocol_order, "round " + std::to_string(a.plan.index) + " has no outcome for vertex " +
                                                std::to_string(v));
        }
    }
}

bool attempt_passed(const Attempt &a, const pattern::MeasurementPattern &pattern) {
    require_complete(a);
    const auto &s = a.plan.secrets;
    for (Vertex v = 0; v < pattern.vertex_count(); ++v) {
        if (s.is_trap(v) && *a.outcomes[v] != ubqc::trap_expected(v, s, pattern.graph)) return false;
    }
    return true;
}

std::uint64_t attempt_output(const Attempt &a, Bit flip, const pattern::MeasurementPattern &pattern) {
    require_complete(a);
    std::vector<std::optional<Bit>> decoded(pattern.vertex_count());
    for (Vertex v = 0; v < pattern.vertex_count(); ++v) {
        decoded[v] = ubqc::decode_outcome(v, *a.outcomes[v], a.plan.secrets);
    }
    const std::uint64_t y = ubqc::pack_output(pattern, decoded);
    return flip ? y ^ output_mask(pattern) : y;
}

void reset_attempt(Attempt &a, RoundPlan plan, std::size_t vertex_count) {
    a.plan = std::move(plan);
    a.deltas.assign(vertex_count, std::nullopt);
    a.outcomes.assign(vertex_count, std::nullopt);
    a.preps_sent = 0;
    a.redo_by.reset();
}

}  // namespace

Partition partition_rounds(const ProtocolParams &params, Rng &rng) {
    params.validate();
    const std::uint32_t n = params.n();
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    for (std::uint32_t i = 0; i < params.d; ++i) {
        std::swap(idx[i], idx[i + rng.below(n - i)]);
    }
    Partition part;
    part.computation.assign(idx.begin(), idx.begin() + params.d);
    part.test.assign(idx.begin() + params.d, idx.end());
    std::sort(part.computation.begin(), part.computation.end());
    std::sort(part.test.begin(), part.test.end());
    return part;
}

Rng client_stream(const Rng &trial, std::uint32_t round, std::uint32_t attempt) {
    return trial.split(streams::client).split(round).split(attempt);
}

RoundPlan make_plan(std::uint32_t index, std::uint32_t attempt, RoundKind kind,
                    const pattern::MeasurementPattern &pattern, std::span<const Bit> input_bits, Rng &rng) {
    return {index, attempt, kind, ubqc::sample_secrets(kind, pattern, input_bits, rng)};
}

const RoundPlan &handle_redo(RoundTranscript &transcript, Requester requester,
                             const pattern::MeasurementPattern &pattern, Rng &fresh) {
    const std::size_t n = pattern.vertex_count();
    if (requester == Requester::client && transcript.preps_sent >= n) {
        fail(ErrorCode::protocol_order, "client Redo after its last qubit was sent (round " +
                                            std::to_string(transcript.plan.index) + ")");
    }
    const bool complete = std::all_of(transcript.outcomes.begin(), transcript.outcomes.end(),
                                      [](const auto &b) { return b.has_value(); });
    if (requester == Requester::server && complete && !transcript.outcomes.empty()) {
        fail(ErrorCode::protocol_order, "server Redo after round " + std::to_string(transcript.plan.index) + " ended");
    }
    Attempt old = transcript;
    old.redo_by = requester;
    transcript.archived.push_back(std::move(old));
    ++transcript.redo_count;
    const auto &s = transcript.plan;
    RoundPlan next = make_plan(s.index, s.attempt + 1, s.kind, pattern, s.secrets.input_bits, fresh);
    reset_attempt(transcript, std::move(next), n);
    return transcript.plan;
}

void evaluate_round(RoundTranscript &t, const pattern::MeasurementPattern &pattern) {
    t.output.reset();
    t.passed.reset();
    if (t.plan.kind == RoundKind::test) t.passed = attempt_passed(t, pattern);
    else t.output = attempt_output(t, t.output_flip, pattern);
}

const char *reason_name(Verdict::Reason r) {
    switch (r) {
        case Verdict::Reason::none: return "none";
        case Verdict::Reason::too_many_failed_tests: return "too_many_failed_tests";
        case Verdict::Reason::no_majority: return "no_majority";
    }
    return "?";
}

Verdict verify_and_vote(std::span<const RoundTranscript> transcripts, const ProtocolParams &params,
                        const pattern::MeasurementPattern &pattern) {
    if (transcripts.size() != params.n()) {
        fail(ErrorCode::input, "verification needs " + std::to_string(params.n()) + " transcripts, got " +
                                   std::to_string(transcripts.size()));
    }
    Verdict v;
    for (const auto &t : transcripts) {
        if (t.plan.kind == RoundKind::test) {
            if (!attempt_passed(t, pattern)) ++v.c_fail;
        } else {
            ++v.tallies[attempt_output(t, t.output_flip, pattern)];
        }
    }
    if (v.c_fail >= params.w) {
        v.status = Verdict::Status::abort;
        v.reason = Verdict::Reason::too_many_failed_tests;
        return v;
    }
    for (const auto &[y, count] : v.tallies) {
        if (2 * static_cast<std::uint64_t>(count) > params.d) {
            v.status = Verdict::Status::ok;
            v.output = y;
            return v;
        }
    }
    v.status = Verdict::Status::abort;
    v.reason = Verdict::Reason::no_majority;
    return v;
}

Client::Client(const pattern::MeasurementPattern &pattern, const ProtocolParams &params,
               std::vector<Bit> input_bits, const Rng &trial, ClientOptions options)
    : pattern_(pattern),
      params_(params),
      input_bits_(std::move(input_bits)),
      trial_(trial),
      options_(std::move(options)),
      output_mask_(output_mask(pattern)) {
    params_.validate();
    if (input_bits_.size() != pattern_.inputs.size()) {
        fail(ErrorCode::input, "pattern has " + std::to_string(pattern_.inputs.size()) + " inputs, got " +
                                   std::to_string(input_bits_.size()) + " bits");
    }
}

RoundTranscript Client::run_round(std::uint32_t j, RoundKind kind, wire::Transport &transport) {
    using namespace wire;
    const std::size_t n = pattern_.vertex_count();
    RoundTranscript rt;
    Rng rng = client_stream(trial_, j, 0);
    reset_attempt(rt, make_plan(j, 0, kind, pattern_, input_bits_, rng), n);

    auto restart = [&](Requester who) {
        rng = client_stream(trial_, j, rt.plan.attempt + 1);
        handle_redo(rt, who, pattern_, rng);
    };
    auto server_redo = [&](const Message &m) {
        const auto *r = std::get_if<Redo>(&m);
        if (!r) return false;
        if (r->round != j) fail(ErrorCode::session, "Redo for round " + std::to_string(r->round));
        restart(Requester::server);
        return true;
    };

    for (;;) {
        bool again = false;
        for (Vertex v = 0; v <= n && !again; ++v) {
            if (options_.redo && options_.redo->applies(j, rt.plan.attempt) && options_.redo->after_preps == v) {
                if (v >= n) restart(Requester::client);  // throws: outside the client window
                transport.send(Redo{j});
                restart(Requester::client);
                again = true;
            } else if (v < n) {
                transport.send(PrepQubit{j, v, rt.plan.secrets.prep_spec(v)});
                ++rt.preps_sent;
            }
        }
        if (again) continue;

        Message m = transport.receive();
        if (server_redo(m)) continue;
        if (!std::holds_alternative<EntangleDone>(m) || std::get<EntangleDone>(m).round != j) {
            fail(ErrorCode::session, "expected EntangleDone(" + std::to_string(j) + "), got " + describe(m));
        }

        std::vector<std::optional<Bit>> decoded(n);
        const auto &secrets = rt.plan.secrets;
        for (Vertex v : pattern_.graph.ordering()) {
            const Angle delta = kind == RoundKind::computation
                                    ? ubqc::delta_computation(v, secrets, pattern_, decoded)
                                    : ubqc::delta_test(v, secrets, rng);
            rt.deltas[v] = delta;
            transport.send(MeasureInstruction{j, v, delta});
            m = transport.receive();
            if (server_redo(m)) {
                again = true;
                break;
            }
            const auto *o = std::get_if<Outcome>(&m);
            if (!o || o->round != j || o->vertex != v) {
                fail(ErrorCode::session, "expected Outcome(" + std::to_string(j) + ", " + std::to_string(v) +
                                             "), got " + describe(m));
            }
            rt.outcomes[v] = o->bit;
            if (kind == RoundKind::computation) decoded[v] = ubqc::decode_outcome(v, o->bit, secrets);
        }
        if (!again) break;
    }

    if (kind == RoundKind::computation && options_.flip_probability > 0) {
        Rng inherent = trial_.split(streams::inherent).split(j);
        rt.output_flip = inherent.bernoulli(options_.flip_probability) ? 1 : 0;
    }
    evaluate_round(rt, pattern_);
    return rt;
}

ProtocolRun Client::run(wire::Transport &transport) {
    ProtocolRun out;
    Rng prng = trial_.split(streams::client).split(kPartitionStream);
    out.partition = partition_rounds(params_, prng);
    std::vector<RoundKind> kinds(params_.n(), RoundKind::test);
    for (auto j : out.partition.computation) kinds[j] = RoundKind::computation;
    out.transcripts.reserve(params_.n());
    for (std::uint32_t j = 0; j < params_.n(); ++j) out.transcripts.push_back(run_round(j, kinds[j], transport));
    out.verdict = verify_and_vote(out.transcripts, params_, pattern_);
    if (out.verdict.ok()) transport.send(wire::Ok{});
    else transport.send(wire::Abort{});
    return out;
}

ProtocolRun run_protocol(const ProtocolParams &params, const pattern::MeasurementPattern &pattern,
                         std::span<const Bit> input_bits, const threat::ThreatSpec &threat, const Rng &trial,
                         double flip_probability, SessionHooks hooks) {
    ServerEndpoint server(pattern.graph, threat, params, pattern, trial, hooks.server_view);
    wire::InProcessTransport transport(server, hooks.log);
    ClientOptions options{flip_probability, threat.client_redo};
    Client client(pattern, params, {input_bits.begin(), input_bits.end()}, trial, options);
    return client.run(transport);
}

}  // namespace vbqc::rounds
