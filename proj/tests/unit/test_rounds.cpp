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

#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "bounds.hpp"
#include "doctest.h"
#include "harness.hpp"
#include "pattern.hpp"
#include "rounds.hpp"
#include "server.hpp"
#include "support.hpp"
#include "threat.hpp"
#include "transport.hpp"

using namespace vbqc;
using namespace vbqc::rounds;
using vbqc::test::error_of;
using vbqc::test::within_sigma;

namespace {

ProtocolParams params(std::uint32_t d, std::uint32_t t, std::uint32_t w, std::uint32_t k = 1) {
    ProtocolParams p;
    p.d = d;
    p.t = t;
    p.w = w;
    p.k = k;
    return p;
}

/// Identity pattern round with theta = 0, r = 0: the decoded output of a
/// computation round is b, a test round passes iff b = 0.
RoundTranscript identity_round(RoundKind kind, Bit b, std::uint32_t index) {
    RoundTranscript t;
    t.plan.index = index;
    t.plan.kind = kind;
    t.plan.secrets.kind = kind;
    t.plan.secrets.thetas = {Angle(0)};
    t.plan.secrets.rs = {Bit{0}};
    t.plan.secrets.dummies = {std::nullopt};
    if (kind == RoundKind::test) t.plan.secrets.trap_color = 0;
    else t.plan.secrets.input_bits = {0};
    t.deltas = {Angle(0)};
    t.outcomes = {b};
    t.preps_sent = 1;
    return t;
}

threat::ThreatSpec threat_of(const std::string &body) { return threat::parse_threat("vbqc-threat 1\n" + body); }

struct FrameShape {
    wire::Direction direction;
    wire::Tag tag;
    std::size_t length;
    friend bool operator==(const FrameShape &, const FrameShape &) = default;
};

std::vector<FrameShape> shapes(const wire::WireLog &log) {
    std::vector<FrameShape> out;
    for (const auto &e : log.entries) out.push_back({e.direction, wire::tag_of(wire::decode(e.frame)), e.frame.size()});
    return out;
}

}  // namespace

TEST_CASE("partition_rounds sizes and uniformity") {
    Rng rng(17);
    const auto p = params(1, 1, 1);
    std::uint64_t zero_first = 0;
    for (int i = 0; i < 20000; ++i) {
        const auto part = partition_rounds(p, rng);
        REQUIRE(part.computation.size() == 1);
        REQUIRE(part.test.size() == 1);
        zero_first += part.computation[0] == 0;
    }
    CHECK(within_sigma(zero_first, 20000, 0.5));

    const auto p4 = params(2, 2, 1);
    std::map<std::vector<std::uint32_t>, std::uint64_t> subsets;
    for (int i = 0; i < 60000; ++i) {
        const auto part = partition_rounds(p4, rng);
        std::set<std::uint32_t> all(part.computation.begin(), part.computation.end());
        all.insert(part.test.begin(), part.test.end());
        REQUIRE(all.size() == 4);
        ++subsets[part.computation];
    }
    REQUIRE(subsets.size() == 6);
    std::vector<std::uint64_t> counts;
    for (const auto &[c, n] : subsets) {
        CHECK(within_sigma(n, 60000, 1.0 / 6));
        counts.push_back(n);
    }
    CHECK(vbqc::test::uniform_p_value(counts) > 1e-4);

    CHECK(error_of([&] { partition_rounds(params(3, 0, 0), rng); }) == ErrorCode::input);
}

TEST_CASE("verify_and_vote examples") {
    const auto id = pattern::single_qubit_identity();
    std::vector<RoundTranscript> ts;
    ts.push_back(identity_round(RoundKind::computation, 1, 0));
    ts.push_back(identity_round(RoundKind::computation, 1, 1));
    ts.push_back(identity_round(RoundKind::computation, 0, 2));
    ts.push_back(identity_round(RoundKind::test, 0, 3));
    auto v = verify_and_vote(ts, params(3, 1, 1), id);
    CHECK(v.ok());
    CHECK(v.output == 1);
    CHECK(v.c_fail == 0);

    std::vector<RoundTranscript> tie{identity_round(RoundKind::computation, 1, 0),
                                     identity_round(RoundKind::computation, 0, 1),
                                     identity_round(RoundKind::test, 0, 2)};
    v = verify_and_vote(tie, params(2, 1, 1), id);
    CHECK_FALSE(v.ok());
    CHECK(v.reason == Verdict::Reason::no_majority);

    std::vector<RoundTranscript> failing{identity_round(RoundKind::computation, 1, 0),
                                         identity_round(RoundKind::test, 1, 1), identity_round(RoundKind::test, 1, 2),
                                         identity_round(RoundKind::test, 0, 3)};
    v = verify_and_vote(failing, params(1, 3, 2), id);
    CHECK(v.c_fail == 2);
    CHECK(v.reason == Verdict::Reason::too_many_failed_tests);
    v = verify_and_vote(failing, params(1, 3, 3), id);
    CHECK(v.ok());

    CHECK(error_of([&] { verify_and_vote(failing, params(1, 4, 3), id); }) == ErrorCode::input);
}

TEST_CASE("verify_and_vote recomputes results instead of trusting them") {
    const auto id = pattern::single_qubit_identity();
    std::vector<RoundTranscript> ts{identity_round(RoundKind::computation, 1, 0), identity_round(RoundKind::test, 1, 1)};
    ts[1].passed = true;
    ts[0].output = 0;
    const auto v = verify_and_vote(ts, params(1, 1, 1), id);
    CHECK(v.c_fail == 1);
    CHECK(v.tallies.at(1) == 1);
}

TEST_CASE("honest noiseless runs accept the correct output") {
    const threat::ThreatSpec honest;
    SUBCASE("identity pattern, x = 0") {
        const auto id = pattern::single_qubit_identity();
        const std::vector<Bit> x{0};
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto run = run_protocol(params(3, 3, 1), id, x, honest, Rng(s));
            CHECK(run.verdict.ok());
            CHECK(run.verdict.output == 0);
            for (const auto &t : run.transcripts) {
                if (t.plan.kind == RoundKind::test) CHECK(*t.passed);
            }
        }
    }
    SUBCASE("deterministic fixtures, both inputs") {
        for (const auto &p : {pattern::two_qubit_wire(), pattern::three_qubit_line()}) {
            for (Bit x = 0; x < 2; ++x) {
                const std::vector<Bit> in{x};
                for (std::uint64_t s = 0; s < 30; ++s) {
                    const auto run = run_protocol(params(5, 5, 1, 2), p, in, honest, Rng(100 + s));
                    CHECK(run.verdict.ok());
                    CHECK(run.verdict.output == x);
                    CHECK(run.verdict.c_fail == 0);
                    for (const auto &t : run.transcripts) {
                        if (t.plan.kind == RoundKind::computation) CHECK(*t.output == x);
                    }
                }
            }
        }
    }
}

TEST_CASE("X deviation on a trap before measurement fails the test round") {
    const auto id = pattern::single_qubit_identity();
    const std::vector<Bit> x{0};
    const auto run = run_protocol(params(1, 5, 5), id, x, threat_of("on * 0 before-measure pauli X\n"), Rng(9));
    CHECK(run.verdict.c_fail == 5);
    CHECK(run.verdict.reason == Verdict::Reason::too_many_failed_tests);
    for (const auto &t : run.transcripts) {
        if (t.plan.kind == RoundKind::test) CHECK_FALSE(*t.passed);
    }
}

TEST_CASE("X on every qubit of every round aborts with w = 1") {
    const auto line = pattern::three_qubit_line();
    const std::vector<Bit> x{1};
    const auto spec = threat_of("on * 0 before-measure pauli X\non * 1 before-measure pauli X\n"
                                "on * 2 before-measure pauli X\n");
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto run = run_protocol(params(5, 5, 1, 2), line, x, spec, Rng(s));
        CHECK_FALSE(run.verdict.ok());
        CHECK(run.verdict.reason == Verdict::Reason::too_many_failed_tests);
    }
}

TEST_CASE("Ok implies c_fail < w and a strict majority") {
    const auto wire = pattern::two_qubit_wire();
    const std::vector<Bit> x{1};
    const auto spec = threat_of("noise pauli 0.05 0.02 0.05\n");
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto run = run_protocol(params(4, 6, 2, 2), wire, x, spec, Rng(s), 0.2);
        const auto &v = run.verdict;
        if (v.ok()) {
            CHECK(v.c_fail < 2);
            CHECK(2 * v.tallies.at(v.output) > 4);
        }
    }
}

TEST_CASE("handle_redo windows and fresh secrets") {
    const auto wire = pattern::two_qubit_wire();
    Rng rng(4);
    RoundTranscript t;
    t.plan = make_plan(3, 0, RoundKind::test, wire, {}, rng);
    t.deltas.assign(2, std::nullopt);
    t.outcomes.assign(2, std::nullopt);

    t.preps_sent = 1;
    handle_redo(t, Requester::client, wire, rng);
    CHECK(t.redo_count == 1);
    CHECK(t.archived.size() == 1);
    CHECK(t.plan.index == 3);
    CHECK(t.plan.attempt == 1);
    CHECK(t.plan.kind == RoundKind::test);
    CHECK(*t.archived[0].redo_by == Requester::client);

    t.preps_sent = 2;
    CHECK(error_of([&] { handle_redo(t, Requester::client, wire, rng); }) == ErrorCode::protocol_order);
    handle_redo(t, Requester::server, wire, rng);
    CHECK(t.redo_count == 2);

    t.preps_sent = 2;
    t.outcomes = {Bit{0}, Bit{1}};
    CHECK(error_of([&] { handle_redo(t, Requester::server, wire, rng); }) == ErrorCode::protocol_order);
}

TEST_CASE("redo resamples every secret") {
    const auto line = pattern::three_qubit_line();
    Rng rng(21);
    int changed = 0;
    for (int i = 0; i < 200; ++i) {
        RoundTranscript t;
        t.plan = make_plan(0, 0, RoundKind::test, line, {}, rng);
        t.deltas.assign(3, std::nullopt);
        t.outcomes.assign(3, std::nullopt);
        const auto before = t.plan.secrets;
        handle_redo(t, Requester::server, line, rng);
        const auto &after = t.plan.secrets;
        changed += before.trap_color != after.trap_color || before.thetas != after.thetas || before.rs != after.rs ||
                   before.dummies != after.dummies;
    }
    CHECK(changed >= 190);
}

TEST_CASE("archived attempts never count toward c_fail") {
    const auto wire = pattern::two_qubit_wire();
    Rng rng(31);
    RoundTranscript t;
    do {
        t.plan = make_plan(1, 0, RoundKind::test, wire, {}, rng);
    } while (*t.plan.secrets.trap_color != 0);
    t.deltas.assign(2, std::nullopt);
    t.outcomes.assign(2, std::nullopt);
    t.preps_sent = 2;
    t.outcomes[0] = ubqc::trap_expected(0, t.plan.secrets, wire.graph) ^ 1;  // failing trap
    handle_redo(t, Requester::server, wire, rng);

    t.preps_sent = 2;
    for (Vertex v = 0; v < 2; ++v) {
        t.outcomes[v] = t.plan.secrets.is_trap(v) ? ubqc::trap_expected(v, t.plan.secrets, wire.graph) : Bit{0};
    }
    RoundTranscript c;
    c.plan = make_plan(0, 0, RoundKind::computation, wire, std::vector<Bit>{0}, rng);
    c.outcomes = {Bit{0}, Bit{0}};
    const std::vector<RoundTranscript> ts{c, t};
    const auto v = verify_and_vote(ts, params(1, 1, 1, 2), wire);
    CHECK(v.c_fail == 0);
    CHECK(t.archived.size() == 1);
}

TEST_CASE("server redo on every first attempt keeps honest runs correct") {
    const auto line = pattern::three_qubit_line();
    const std::vector<Bit> x{1};
    for (const char *at : {"entangle", "1", "last"}) {
        const auto spec = threat_of(std::string("redo server * attempts 1 at ") + at + "\n");
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto run = run_protocol(params(3, 3, 1, 2), line, x, spec, Rng(s));
            CHECK(run.verdict.ok());
            CHECK(run.verdict.output == 1);
            for (const auto &t : run.transcripts) {
                CHECK(t.redo_count == 1);
                CHECK(t.archived.size() == 1);
            }
        }
    }
}

TEST_CASE("client redo keeps honest runs correct") {
    const auto wire = pattern::two_qubit_wire();
    const std::vector<Bit> x{0};
    threat::ThreatSpec spec;
    spec.client_redo = threat::ClientRedo{std::nullopt, 2, 1};
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto run = run_protocol(params(3, 3, 1, 2), wire, x, spec, Rng(s));
        CHECK(run.verdict.ok());
        for (const auto &t : run.transcripts) CHECK(t.redo_count == 2);
    }
}

TEST_CASE("server sees identical frame types and lengths in computation and test rounds") {
    for (const auto &p : {pattern::single_qubit_identity(), pattern::two_qubit_wire(), pattern::three_qubit_line()}) {
        const auto pp = params(1, 1, 1, static_cast<std::uint32_t>(p.colour_count()));
        const std::vector<Bit> x(p.inputs.size(), 1);
        for (std::uint64_t s = 0; s < 20; ++s) {
            auto shape_of = [&](RoundKind kind) {
                const threat::ThreatSpec honest;
                ServerEndpoint server(p.graph, honest, pp, p, Rng(s));
                wire::WireLog log;
                wire::InProcessTransport transport(server, &log);
                Client client(p, pp, x, Rng(s));
                client.run_round(0, kind, transport);
                return shapes(log);
            };
            CHECK(shape_of(RoundKind::computation) == shape_of(RoundKind::test));
        }
    }
}

TEST_CASE("wrong-majority rate respects the Hoeffding bound") {
    const auto id = pattern::single_qubit_identity();
    const std::vector<Bit> x{0};
    const threat::ThreatSpec honest;
    const double q = 0.3;
    for (std::uint32_t d : {5u, 11u, 21u}) {
        constexpr std::uint64_t N = 4000;
        std::uint64_t wrong = 0;
        for (std::uint64_t s = 0; s < N; ++s) {
            const auto run = run_protocol(params(d, 1, 1), id, x, honest, Rng(s), q);
            wrong += !(run.verdict.ok() && run.verdict.output == 0);
        }
        const double bound = std::exp(-2 * (0.5 - q) * (0.5 - q) * d);
        const auto wilson = harness::wilson_interval(wrong, N);
        CHECK(wilson.lo <= bound);
        // exact: Pr[Binomial(d, q) > d/2]
        const double exact = bounds::binomial_exact_sf(d, q, d / 2 + 1);
        CHECK(exact <= bound);
        CHECK(within_sigma(wrong, N, exact));
    }
}
