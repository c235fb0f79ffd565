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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion numbers as arguments to run a
// subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "harness.hpp"
#include "persist.hpp"
#include "rng.hpp"
#include "support.hpp"
#include "threat.hpp"
#include "ubqc.hpp"
#include "wire.hpp"

using namespace vbqc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

harness::ExperimentConfig experiment(const std::string &body) {
    auto c = harness::parse_experiment("vbqc-experiment 1\n" + body);
    c.threads = 0;
    return c;
}

// 1. b = r xor parity(d) with probability exactly 1 on stars, all secrets.
Outcome trap_identity() {
    std::uint64_t cases = 0, bad = 0;
    Rng unused(0);
    for (std::size_t leaves = 1; leaves <= 4; ++leaves) {
        const auto g = pattern::Graph::star(leaves);
        const std::size_t v = g.vertex_count();
        for (int theta = 0; theta < 8; ++theta) {
            for (Bit r : {Bit{0}, Bit{1}}) {
                for (std::uint32_t dmask = 0; dmask < (1u << leaves); ++dmask) {
                    ubqc::RoundSecrets s;
                    s.kind = ubqc::RoundKind::test;
                    s.thetas.assign(v, std::nullopt);
                    s.rs.assign(v, std::nullopt);
                    s.dummies.assign(v, std::nullopt);
                    s.thetas[0] = Angle(theta);
                    s.rs[0] = r;
                    for (std::size_t l = 0; l < leaves; ++l) s.dummies[l + 1] = static_cast<Bit>((dmask >> l) & 1);
                    std::vector<sv::PrepSpec> specs;
                    for (Vertex u = 0; u < v; ++u) specs.push_back(s.prep_spec(u));
                    exact::ExactState state(specs);
                    for (const auto &[a, b] : g.edges()) state.cz(a, b);
                    state.project(0, ubqc::delta_test(0, s, unused), ubqc::trap_expected(0, s, g));
                    ++cases;
                    if (!(state.probability() == exact::QSqrt2{1, 0})) ++bad;
                }
            }
        }
    }
    return {bad == 0, fmt("%llu secret assignments, %llu with Pr != 1", (unsigned long long)cases,
                          (unsigned long long)bad)};
}

// 2. delta distribution identical across angles, inputs and round kinds.
Outcome blindness() {
    std::uint64_t compared = 0, differing = 0;
    for (std::size_t vertices : {1u, 2u}) {
        const auto base = vertices == 1 ? pattern::single_qubit_identity() : pattern::two_qubit_wire();
        std::optional<std::map<std::vector<std::uint8_t>, exact::QSqrt2>> reference;
        auto check = [&](const exact::EnumerationRequest &req) {
            const auto m = exact::enumerate_exact(req).delta_marginal();
            if (!reference) {
                reference = m;
                return;
            }
            ++compared;
            if (!exact::tv_distance(*reference, m).is_zero()) ++differing;
        };
        const int combos = vertices == 1 ? 8 : 64;
        for (int a = 0; a < combos; ++a) {
            auto p = base;
            p.angles[0] = Angle(a % 8);
            if (vertices == 2) p.angles[1] = Angle(a / 8);
            for (Bit x : {Bit{0}, Bit{1}}) {
                exact::EnumerationRequest req;
                req.pattern = &p;
                req.input_bits = {x};
                check(req);
                req.kind = ubqc::RoundKind::test;
                check(req);
            }
        }
    }
    return {compared > 0 && differing == 0,
            fmt("%llu distributions compared against the first, %llu with TV != 0", (unsigned long long)compared,
                (unsigned long long)differing)};
}

// 3. X on vertex 0 of the wire is caught in half the test rounds.
Outcome detection_rate() {
    auto c = experiment("pattern builtin wire\nrounds 1 1\nthreshold 1\n"
                        "on * 0 before-measure pauli X measurement\ntrials 50000\nseed 303\n");
    const auto r = harness::run_experiment(c);
    const auto ci = harness::wilson_interval(r.failed_test_rounds, r.test_rounds);

    const auto p = pattern::two_qubit_wire();
    exact::EnumerationRequest req;
    req.pattern = &p;
    req.kind = ubqc::RoundKind::test;
    req.input_bits = {0};
    threat::Directive d;
    d.vertex = 0;
    d.stage = threat::Stage::before_measure;
    d.action = threat::Action::make_pauli(sv::Pauli::X, threat::Frame::measurement);
    req.deviation = {d};
    const auto exact_rate = exact::enumerate_exact(req).fail_probability();
    const bool exact_half = exact_rate == exact::QSqrt2{exact::Rational(1, 2), 0};
    return {r.test_rounds == 50000 && ci.lo <= 0.5 && 0.5 <= ci.hi && exact_half,
            fmt("%llu/%llu test rounds failed, rate %.5f, Wilson95 [%.5f, %.5f], exact %s",
                (unsigned long long)r.failed_test_rounds, (unsigned long long)r.test_rounds,
                static_cast<double>(r.failed_test_rounds) / r.test_rounds, ci.lo, ci.hi, exact_rate.str().c_str())};
}

// 4. accepted-but-wrong never exceeds the minimised bound under E_m.
Outcome verifiability_consistency() {
    const std::uint32_t n = 40, w = 4;
    std::ostringstream detail;
    bool pass = true;
    double bound_value = 1;
    for (std::uint32_t m : {0u, n / 4, n / 2, n}) {
        std::string body = "pattern builtin line\nrounds 20 20\nthreshold " + std::to_string(w) +
                           "\ninherent 0\ninput 1\ntrials 100000\nseed " + std::to_string(4000 + m) + "\n";
        if (m > 0) body += "attack em " + std::to_string(m) + " X\n";
        auto c = experiment(body);
        if (m == 0) bound_value = bounds::minimize_epsilon_ver(c.params).epsilon_ver;
        const auto r = harness::run_experiment(c);
        const auto ci = harness::wilson_interval(r.fail_count, r.trials);
        const bool ok = ci.lo <= bound_value;
        pass = pass && ok;
        detail << "m=" << m << " wrong " << r.fail_count << "/" << r.trials << " lo " << ci.lo << "; ";
    }
    detail << "omega " << static_cast<double>(w) / 20 << ", clamped eps_ver " << bound_value;
    return {pass, detail.str()};
}

// 5. rejection of honest noisy devices, both sides of the threshold.
Outcome noise_robustness() {
    std::ostringstream detail;
    bool pass = true;
    struct Case {
        const char *label;
        double eps;
        std::uint32_t w;
    };
    // eps chosen so that q = 2 eps (1 - eps) is 0.1 and 0.25
    const Case cases[] = {{"a", (1 - std::sqrt(0.8)) / 2, 12}, {"b", (1 - std::sqrt(0.5)) / 2, 3}};
    for (const auto &cs : cases) {
        auto c = experiment(fmt("pattern builtin wire\nrounds 30 30\nthreshold %u\ninherent 0\n"
                                "noise pauli %.17g 0 0\ntrials 50000\nseed %d\n",
                                cs.w, cs.eps, cs.label[0] == 'a' ? 501 : 502));
        const double q = threat::trap_failure_summary(c.threat.noise, c.pattern).mean;
        const double omega = cs.w / 30.0, tau = 0.5, n = 60;
        const auto r = harness::run_experiment(c);
        std::uint64_t count;
        double bound;
        if (omega > q) {
            count = r.abort_count();
            bound = bounds::epsilon_rej(omega, q, tau, n);
        } else {
            count = r.accept_count;
            bound = bounds::epsilon_accept_under_excess_noise(omega, q, tau, n);
        }
        const auto row = harness::compare_rate(omega > q ? "abort" : "accept", count, r.trials, bound);
        pass = pass && !row.violation;
        detail << "(" << cs.label << ") q " << q << " omega " << omega << " " << row.quantity << " " << count << "/"
               << r.trials << " Wilson lo " << row.wilson.lo << " bound " << bound << "; ";
    }
    return {pass, detail.str()};
}

// 6. closed-form tails dominate the exact tails.
Outcome tail_domination() {
    Rng rng(606);
    std::uint64_t tuples = 0, violations = 0;
    while (tuples < 1000) {
        const std::uint64_t N = 2 + rng.below(500);
        const std::uint64_t K = 1 + rng.below(N - 1), s = 1 + rng.below(N);
        const double mean = static_cast<double>(s) * K / N;
        const double lo = rng.uniform() * mean, hi = mean + rng.uniform() * (s - mean);
        const double p = 0.01 + 0.98 * rng.uniform();
        const std::uint64_t bn = 1 + rng.below(2000);
        const double k1 = rng.uniform() * bn * p, k2 = bn * p + rng.uniform() * bn * (1 - p);
        if (!(lo > 0 && lo < mean && hi > mean && k1 > 0 && k2 > bn * p)) continue;
        ++tuples;
        using namespace bounds;
        if (hypergeom_lower_tail_bound(N, K, s, lo) < hypergeom_exact_cdf(N, K, s, static_cast<std::int64_t>(lo)))
            ++violations;
        if (hypergeom_upper_tail_bound(N, K, s, hi) <
            hypergeom_exact_sf(N, K, s, static_cast<std::int64_t>(std::ceil(hi))))
            ++violations;
        if (binomial_tail_bound(bn, p, k1, Side::lower) < binomial_exact_cdf(bn, p, static_cast<std::int64_t>(k1)))
            ++violations;
        if (binomial_tail_bound(bn, p, k2, Side::upper) <
            binomial_exact_sf(bn, p, static_cast<std::int64_t>(std::ceil(k2))))
            ++violations;
    }
    return {violations == 0, fmt("%llu tuples x 4 tails, %llu violations", (unsigned long long)tuples,
                                 (unsigned long long)violations)};
}

// 7. log eps_ver is affine in n with the analytic slope.
Outcome exponential_decay() {
    bounds::BoundInputs in;
    in.delta = in.tau = 0.5;
    in.k = 2;
    in.p = 0;
    in.phi = 0.3;
    in.eps1 = 0.05;
    in.eps3 = 0.15;
    const double c = 0.5;
    const double rate = 2 * in.tau * in.tau * in.eps1 * in.eps1 / (c - in.phi);
    in.eps2 = std::sqrt(rate / (2 * (c - in.phi - in.eps1) * in.tau));
    const double ns[] = {1e2, 1e3, 1e4, 1e5};
    double worst = 0;
    std::ostringstream detail;
    for (int i = 0; i + 1 < 4; ++i) {
        auto a = in, b = in;
        a.n = ns[i];
        b.n = ns[i + 1];
        const double slope = (bounds::log_epsilon_ver(b) - bounds::log_epsilon_ver(a)) / (b.n - a.n);
        worst = std::max(worst, std::abs(slope + rate) / rate);
        detail << slope << " ";
    }
    detail << "vs -" << rate << ", max relative error " << worst;
    return {worst <= 1e-9, detail.str()};
}

// 8. Redo on every first attempt leaves the verdict distribution unchanged.
Outcome redo_safety() {
    const std::string body = "pattern builtin wire\nrounds 6 6\nthreshold 2\nflip 0.3\nnoise pauli 0.08 0 0\n"
                             "trials 20000\n";
    auto plain = experiment(body + "seed 801\n");
    auto redo = experiment(body + "seed 802\nredo server * attempts 1\n");
    const auto a = harness::run_experiment(plain);
    const auto b = harness::run_experiment(redo);
    const auto chi = harness::chi_square_homogeneity(a.verdicts, b.verdicts);
    const bool counted_once = b.test_rounds == 6ull * b.trials && b.redo_count == 12ull * b.trials;
    std::ostringstream detail;
    detail << "chi2 " << chi.statistic << " dof " << chi.dof << " p " << chi.p_value << ", redos " << b.redo_count
           << ", test rounds counted " << b.test_rounds << "; verdicts";
    for (const auto &[k, v] : a.verdicts) detail << " " << k << "=" << v << "/" << (b.verdicts.count(k) ? b.verdicts.at(k) : 0);
    return {chi.dof >= 1 && chi.p_value >= 0.01 && counted_once, detail.str()};
}

// 9. Message round-trip and byte-exact replay.
Outcome wire_replay() {
    Rng rng(909);
    std::uint64_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto m = test::random_message(rng);
        if (!(wire::decode(wire::encode(m)) == m)) ++bad;
    }
    auto c = experiment("pattern builtin line\nrounds 5 5\nthreshold 2\nnoise pauli 0.1 0.05 0\n"
                        "redo server 3 attempts 1\ninput 1\ntrials 1\nseed 9\n");
    c.capture_prefix = "unused";
    const auto r = harness::run_experiment(c);
    const auto result = rounds::replay(r.capture->wire_log, r.capture->client_view, r.capture->server_view);
    return {bad == 0 && result.ok(),
            fmt("%llu/10000 round-trip mismatches; replayed verdict %s, server view %s", (unsigned long long)bad,
                result.verdict_matches ? "identical" : "differs",
                result.server_view_matches.value_or(false) ? "identical" : "differs")};
}

// 10. The optimiser beats every feasible grid point.
Outcome optimizer_dominance() {
    Rng rng(1010);
    std::ostringstream detail;
    bool pass = true;
    for (int set = 0; set < 5; ++set) {
        bounds::BoundSpec spec;
        spec.n = std::pow(10, 2 + 3 * rng.uniform());
        spec.delta = 0.2 + 0.6 * rng.uniform();
        spec.tau = 1 - spec.delta;
        spec.k = 1 + static_cast<std::uint32_t>(rng.below(3));
        spec.p = 0.2 * rng.uniform();
        const double c = (2 * spec.p - 1) / (2 * spec.p - 2);
        spec.omega = (0.1 + 0.8 * rng.uniform()) * c / spec.k;
        spec.p_max = spec.omega * rng.uniform();
        const auto best = bounds::minimize_epsilon_ver(spec);

        const int g = 22;
        std::uint64_t samples = 0, beaten = 0;
        for (int i = 0; i < g; ++i) {
            for (int j = 0; j < g; ++j) {
                for (int l = 0; l < g; ++l) {
                    bounds::BoundInputs in;
                    in.n = spec.n;
                    in.delta = spec.delta;
                    in.tau = spec.tau;
                    in.k = spec.k;
                    in.p = spec.p;
                    in.phi = (c - spec.k * spec.omega) * (i + 0.5) / g;
                    in.eps1 = std::min(0.5 - in.phi, c - in.phi - spec.k * spec.omega) * (j + 0.5) / g;
                    in.eps3 = in.phi * (l + 0.5) / g;
                    in.eps2 = 1.0 / spec.k - spec.omega / (c - in.phi - in.eps1);
                    if (bounds::infeasibility(in)) continue;
                    ++samples;
                    const double v = bounds::log_epsilon_ver(in);
                    if (best.log_epsilon_ver > v + 1e-12 * std::abs(v)) ++beaten;
                }
            }
        }
        pass = pass && samples >= 10000 && beaten == 0;
        detail << "set " << set << ": " << samples << " samples, " << beaten << " below the optimum; ";
    }
    return {pass, detail.str()};
}

}  // namespace

int main(int argc, char **argv) {
    struct Criterion {
        int id;
        const char *name;
        std::function<Outcome()> run;
        double limit_sec;  // 0: none
    };
    const std::vector<Criterion> criteria{
        {1, "trap identity", trap_identity, 10},
        {2, "blindness oracle", blindness, 30},
        {3, "detection rate", detection_rate, 0},
        {4, "verifiability bound consistency", verifiability_consistency, 600},
        {5, "noise robustness", noise_robustness, 0},
        {6, "tail-bound domination", tail_domination, 5},
        {7, "exponential decay", exponential_decay, 0},
        {8, "redo safety", redo_safety, 0},
        {9, "wire round-trip and replay", wire_replay, 0},
        {10, "optimizer dominance", optimizer_dominance, 0},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto &c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_sec == 0 || sec < c.limit_sec;
        const bool pass = o.pass && in_time;
        if (!pass) ++failures;
        std::printf("%s %2d %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), sec,
                    in_time ? "" : fmt(", limit %.0f s", c.limit_sec).c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
