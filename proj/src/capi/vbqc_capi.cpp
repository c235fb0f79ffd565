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

#include "vbqc/vbqc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "bounds.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "harness.hpp"
#include "json.hpp"
#include "pattern.hpp"
#include "persist.hpp"
#include "threat.hpp"

struct vbqc_pattern {
    vbqc::pattern::MeasurementPattern value;
};

struct vbqc_experiment {
    vbqc::harness::ExperimentConfig value;
};

struct vbqc_report {
    vbqc::harness::ExperimentReport value;
};

struct vbqc_distribution {
    vbqc::exact::ExactDistribution value;
};

namespace {

using namespace vbqc;
using nlohmann::json;

thread_local std::string last_error;

template <typename F>
vbqc_status guarded(F &&body) {
    try {
        body();
        last_error.clear();
        return VBQC_OK;
    } catch (const Error &e) {
        last_error = e.what();
        return static_cast<vbqc_status>(static_cast<int>(e.code()));
    } catch (const json::exception &e) {
        last_error = e.what();
        return VBQC_ERR_PARSE;
    } catch (const std::bad_alloc &) {
        last_error = "out of memory";
        return VBQC_ERR_CAPACITY;
    } catch (const std::exception &e) {
        last_error = e.what();
        return VBQC_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return VBQC_ERR_INTERNAL;
    }
}

char *dup(const std::string &s) {
    char *out = static_cast<char *>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

vbqc_status null_argument(const char *name) {
    last_error = std::string(name) + " is NULL";
    return VBQC_ERR_NULL_ARGUMENT;
}

#define VBQC_REQUIRE(p)                                \
    do {                                               \
        if (!(p)) return null_argument(#p);            \
    } while (0)

ProtocolParams to_params(const vbqc_params &p) { return {p.d, p.t, p.w, p.k, p.p, p.p_min, p.p_max}; }

json check_json(const pattern::ColoringCheck &c) { return {{"valid", c.valid()}, {"problem", c.describe()}}; }

json coloring_json(const pattern::Coloring &c) {
    json classes = json::array();
    for (const auto &cls : c.classes) classes.push_back(cls);
    return classes;
}

std::string exact_str(const exact::QSqrt2 &x) { return x.str(); }

json q_json(const exact::QSqrt2 &x) { return {{"exact", exact_str(x)}, {"value", x.value()}}; }

}  // namespace

extern "C" {

const char *vbqc_version(void) { return "1.0.0"; }

const char *vbqc_status_name(vbqc_status status) {
    switch (status) {
        case VBQC_OK: return "ok";
        case VBQC_ERR_NULL_ARGUMENT: return "null_argument";
        case VBQC_ERR_INTERNAL: return "internal";
        default: break;
    }
    const int code = static_cast<int>(status);
    if (code >= 1 && code <= 12) return error_code_name(static_cast<ErrorCode>(code));
    return "unknown";
}

const char *vbqc_last_error(void) { return last_error.c_str(); }

void vbqc_string_free(char *s) { std::free(s); }

vbqc_status vbqc_pattern_builtin(const char *name, int k, vbqc_pattern **out) {
    VBQC_REQUIRE(name);
    VBQC_REQUIRE(out);
    return guarded([&] { *out = new vbqc_pattern{harness::builtin_pattern(name, k)}; });
}

vbqc_status vbqc_pattern_parse(const char *text, vbqc_pattern **out) {
    VBQC_REQUIRE(text);
    VBQC_REQUIRE(out);
    return guarded([&] { *out = new vbqc_pattern{pattern::parse_pattern(text)}; });
}

vbqc_status vbqc_pattern_load(const char *path, vbqc_pattern **out) {
    VBQC_REQUIRE(path);
    VBQC_REQUIRE(out);
    return guarded([&] { *out = new vbqc_pattern{pattern::load_pattern(path)}; });
}

void vbqc_pattern_free(vbqc_pattern *pattern) { delete pattern; }

size_t vbqc_pattern_vertex_count(const vbqc_pattern *pattern) { return pattern ? pattern->value.vertex_count() : 0; }

size_t vbqc_pattern_colour_count(const vbqc_pattern *pattern) { return pattern ? pattern->value.colour_count() : 0; }

vbqc_status vbqc_pattern_with_angles(const vbqc_pattern *pattern, const uint8_t *angles, size_t count,
                                     vbqc_pattern **out) {
    VBQC_REQUIRE(pattern);
    VBQC_REQUIRE(out);
    if (count > 0 && !angles) return null_argument("angles");
    return guarded([&] {
        if (count != pattern->value.vertex_count()) {
            throw Error(ErrorCode::input, "need one angle per vertex (" + std::to_string(pattern->value.vertex_count()) + ")");
        }
        auto copy = pattern->value;
        for (size_t v = 0; v < count; ++v) copy.angles[v] = Angle(angles[v]);
        copy.validate();
        *out = new vbqc_pattern{std::move(copy)};
    });
}

vbqc_status vbqc_pattern_format(const vbqc_pattern *pattern, char **out_text) {
    VBQC_REQUIRE(pattern);
    VBQC_REQUIRE(out_text);
    return guarded([&] { *out_text = dup(pattern::format_pattern(pattern->value)); });
}

vbqc_status vbqc_pattern_colour(const vbqc_pattern *pattern, char **out_json) {
    VBQC_REQUIRE(pattern);
    VBQC_REQUIRE(out_json);
    return guarded([&] {
        const auto &p = pattern->value;
        const auto greedy = pattern::greedy_coloring(p.graph, p.graph.ordering());
        const auto check = pattern::validate_coloring(p.graph, greedy.classes);
        const auto stored = pattern::validate_coloring(p.graph, p.coloring.classes);
        json j = check_json(check);
        j["k"] = greedy.size();
        j["classes"] = coloring_json(greedy);
        j["vertices"] = p.vertex_count();
        j["max_degree"] = p.graph.max_degree();
        j["stored"] = check_json(stored);
        j["stored"]["k"] = p.coloring.size();
        j["stored"]["classes"] = coloring_json(p.coloring);
        *out_json = dup(j.dump(2));
    });
}

vbqc_status vbqc_threshold_region(uint32_t k, double p, double *lo, double *hi) {
    VBQC_REQUIRE(lo);
    VBQC_REQUIRE(hi);
    return guarded([&] {
        const auto r = bounds::threshold_region(k, p);
        *lo = r.lo;
        *hi = r.hi;
    });
}

vbqc_status vbqc_bound_evaluate(double n, double delta, double tau, uint32_t k, double p, double phi, double eps1,
                                double eps2, double eps3, char **out_json) {
    VBQC_REQUIRE(out_json);
    return guarded([&] {
        const bounds::BoundInputs in{n, delta, tau, k, p, phi, eps1, eps2, eps3};
        const auto terms = bounds::ver_terms(in);
        const double ver = bounds::epsilon_ver(in);
        json j = {{"eps4", in.eps4()},
                  {"omega", in.omega()},
                  {"log_terms", {{"a1", terms.a1}, {"a2", terms.a2}, {"b1", terms.b1}, {"b2", terms.b2}}},
                  {"log_epsilon_ver", bounds::log_epsilon_ver(in)},
                  {"epsilon_ver", ver},
                  {"epsilon_sec", bounds::epsilon_sec(ver)}};
        *out_json = dup(j.dump(2));
    });
}

vbqc_status vbqc_bound_minimize(const vbqc_params *params, double omega, char **out_json) {
    VBQC_REQUIRE(params);
    VBQC_REQUIRE(out_json);
    return guarded([&] {
        std::optional<double> target;
        if (!std::isnan(omega)) target = omega;
        *out_json = dup(bounds::to_json(bounds::minimize_epsilon_ver(to_params(*params), target)));
    });
}

vbqc_status vbqc_bound_sweep(const vbqc_params *shape, const char *variable, double from, double to, uint32_t steps,
                             char **out_csv) {
    VBQC_REQUIRE(shape);
    VBQC_REQUIRE(variable);
    VBQC_REQUIRE(out_csv);
    return guarded([&] {
        const auto params = to_params(*shape);
        params.validate();
        const std::string var = variable;
        if (var != "n" && var != "omega") throw Error(ErrorCode::input, "sweep variable is 'n' or 'omega'");
        if (steps < 1) throw Error(ErrorCode::input, "sweep needs at least one step");
        if (var == "n" && !(from > 0 && to > 0)) throw Error(ErrorCode::input, "n sweep needs positive endpoints");
        std::string csv = bounds::csv_header() + "\n";
        for (uint32_t i = 0; i < steps; ++i) {
            const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
            auto spec = bounds::BoundSpec::from(params);
            if (var == "n") spec.n = std::round(from * std::pow(to / from, f));
            else spec.omega = from + f * (to - from);
            csv += bounds::csv_row(bounds::minimize_epsilon_ver(spec)) + "\n";
        }
        *out_csv = dup(csv);
    });
}

vbqc_status vbqc_tune_n(const vbqc_params *shape, double target_sec, double target_cor, double p_max,
                        char **out_json) {
    VBQC_REQUIRE(shape);
    VBQC_REQUIRE(out_json);
    return guarded([&] {
        const auto r = bounds::tune_n(to_params(*shape), target_sec, target_cor, p_max);
        json j = {{"n", r.n}, {"d", r.d}, {"t", r.t}, {"w_implied", r.w_implied},
                  {"w", static_cast<std::uint64_t>(std::ceil(r.w_implied))},
                  {"report", json::parse(bounds::to_json(r.report))}};
        *out_json = dup(j.dump(2));
    });
}

vbqc_status vbqc_experiment_parse(const char *text, const char *base_dir, vbqc_experiment **out) {
    VBQC_REQUIRE(text);
    VBQC_REQUIRE(out);
    return guarded([&] { *out = new vbqc_experiment{harness::parse_experiment(text, base_dir ? base_dir : ".")}; });
}

vbqc_status vbqc_experiment_load(const char *path, vbqc_experiment **out) {
    VBQC_REQUIRE(path);
    VBQC_REQUIRE(out);
    return guarded([&] { *out = new vbqc_experiment{harness::load_experiment(path)}; });
}

void vbqc_experiment_free(vbqc_experiment *experiment) { delete experiment; }

vbqc_status vbqc_experiment_set_seed(vbqc_experiment *experiment, uint64_t seed) {
    VBQC_REQUIRE(experiment);
    experiment->value.seed = seed;
    return guarded([] {});
}

vbqc_status vbqc_experiment_set_trials(vbqc_experiment *experiment, uint64_t trials) {
    VBQC_REQUIRE(experiment);
    return guarded([&] {
        if (trials < 1) throw Error(ErrorCode::input, "trials must be at least 1");
        experiment->value.trials = trials;
    });
}

vbqc_status vbqc_experiment_set_threads(vbqc_experiment *experiment, unsigned threads) {
    VBQC_REQUIRE(experiment);
    experiment->value.threads = threads;
    return guarded([] {});
}

vbqc_status vbqc_experiment_set_transport(vbqc_experiment *experiment, vbqc_transport transport,
                                          const char *address) {
    VBQC_REQUIRE(experiment);
    return guarded([&] {
        if (transport != VBQC_TRANSPORT_INPROC && transport != VBQC_TRANSPORT_TCP) {
            throw Error(ErrorCode::input, "unknown transport");
        }
        const std::string addr = address ? address : "";
        if (!addr.empty()) wire::parse_address(addr);
        experiment->value.transport =
            transport == VBQC_TRANSPORT_TCP ? wire::TransportKind::tcp : wire::TransportKind::in_process;
        experiment->value.address = addr;
    });
}

vbqc_status vbqc_experiment_run(const vbqc_experiment *experiment, vbqc_report **out) {
    VBQC_REQUIRE(experiment);
    VBQC_REQUIRE(out);
    return guarded([&] { *out = new vbqc_report{harness::run_experiment(experiment->value)}; });
}

vbqc_status vbqc_experiment_serve(const vbqc_experiment *experiment, uint16_t port, vbqc_ready_fn ready,
                                  void *user) {
    VBQC_REQUIRE(experiment);
    return guarded([&] {
        harness::serve_experiment(experiment->value, port, [&](std::uint16_t p) {
            if (ready) ready(p, user);
        });
    });
}

void vbqc_report_free(vbqc_report *report) { delete report; }

vbqc_status vbqc_report_counts(const vbqc_report *report, vbqc_counts *out) {
    VBQC_REQUIRE(report);
    VBQC_REQUIRE(out);
    const auto &r = report->value;
    *out = {r.trials, r.accept_count, r.fail_count, r.abort_count(), r.test_rounds, r.failed_test_rounds};
    return guarded([] {});
}

int vbqc_report_violation(const vbqc_report *report) { return report && report->value.violation() ? 1 : 0; }

int vbqc_report_anomaly(const vbqc_report *report) { return report && report->value.anomaly ? 1 : 0; }

vbqc_status vbqc_report_json(const vbqc_report *report, char **out_json) {
    VBQC_REQUIRE(report);
    VBQC_REQUIRE(out_json);
    return guarded([&] { *out_json = dup(harness::report_json(report->value)); });
}

vbqc_status vbqc_report_csv(const vbqc_report *report, char **out_csv) {
    VBQC_REQUIRE(report);
    VBQC_REQUIRE(out_csv);
    return guarded([&] { *out_csv = dup(harness::report_csv(report->value)); });
}

vbqc_status vbqc_report_summary(const vbqc_report *report, char **out_text) {
    VBQC_REQUIRE(report);
    VBQC_REQUIRE(out_text);
    return guarded([&] { *out_text = dup(harness::report_summary(report->value)); });
}

vbqc_status vbqc_report_write(const vbqc_report *report, const vbqc_experiment *experiment) {
    VBQC_REQUIRE(report);
    VBQC_REQUIRE(experiment);
    return guarded([&] { harness::write_outputs(report->value, experiment->value); });
}

vbqc_status vbqc_enumerate(const vbqc_pattern *pattern, vbqc_round_kind kind, const uint8_t *input_bits,
                           size_t input_count, const char *deviation, int trap_colour, vbqc_distribution **out) {
    VBQC_REQUIRE(pattern);
    VBQC_REQUIRE(out);
    if (input_count > 0 && !input_bits) return null_argument("input_bits");
    return guarded([&] {
        if (kind != VBQC_ROUND_COMPUTATION && kind != VBQC_ROUND_TEST) throw Error(ErrorCode::input, "unknown round kind");
        exact::EnumerationRequest req;
        req.pattern = &pattern->value;
        req.kind = kind == VBQC_ROUND_TEST ? ubqc::RoundKind::test : ubqc::RoundKind::computation;
        req.input_bits.assign(input_bits, input_bits + input_count);
        if (trap_colour >= 0) req.trap_colour = static_cast<std::size_t>(trap_colour);
        if (deviation && *deviation) {
            std::string text = deviation;
            if (text.rfind("vbqc-threat", 0) != 0) text = "vbqc-threat 1\n" + text;
            const auto spec = threat::parse_threat(text);
            if (!spec.noise.is_pauli() || spec.noise.kind != threat::NoiseModel::Kind::none || spec.em ||
                spec.server_redo || spec.client_redo) {
                throw Error(ErrorCode::unsupported_model, "enumeration takes 'on' deviation lines only");
            }
            req.deviation = spec.attack.every_round;
            if (auto it = spec.attack.rounds.find(0); it != spec.attack.rounds.end()) {
                req.deviation.insert(req.deviation.end(), it->second.begin(), it->second.end());
            }
        }
        *out = new vbqc_distribution{exact::enumerate_exact(req)};
    });
}

void vbqc_distribution_free(vbqc_distribution *distribution) { delete distribution; }

vbqc_status vbqc_distribution_json(const vbqc_distribution *distribution, char **out_json) {
    VBQC_REQUIRE(distribution);
    VBQC_REQUIRE(out_json);
    return guarded([&] {
        const auto &d = distribution->value;
        json j;
        j["leaves"] = d.leaves;
        j["total"] = q_json(d.total());
        const auto deltas = d.delta_marginal();
        json marginal = json::object();
        bool uniform = true;
        std::optional<exact::QSqrt2> first;
        for (const auto &[k, p] : deltas) {
            std::string key;
            for (auto x : k) key += std::to_string(x);
            marginal[key] = exact_str(p);
            if (!first) first = p;
            else if (!(p == *first)) uniform = false;
        }
        const std::size_t v = deltas.empty() ? 0 : deltas.begin()->first.size();
        uniform = uniform && deltas.size() == (std::size_t{1} << (3 * v));
        j["delta_marginal"] = marginal;
        j["delta_uniform"] = uniform;
        bool test = false;
        for (const auto &[k, p] : d.points) test = test || k.passed.has_value();
        if (test) {
            j["fail_probability"] = q_json(d.fail_probability());
        } else {
            json outputs = json::object();
            for (const auto &[y, p] : d.output_marginal()) outputs[std::to_string(y)] = q_json(p);
            j["outputs"] = outputs;
        }
        *out_json = dup(j.dump(2));
    });
}

vbqc_status vbqc_distribution_tv(const vbqc_distribution *a, const vbqc_distribution *b, char **out_exact,
                                 double *out_value) {
    VBQC_REQUIRE(a);
    VBQC_REQUIRE(b);
    return guarded([&] {
        const auto tv = exact::tv_distance(a->value.delta_marginal(), b->value.delta_marginal());
        if (out_exact) *out_exact = dup(tv.str());
        if (out_value) *out_value = tv.value();
    });
}

vbqc_status vbqc_replay(const char *wire_log, const char *client_view, const char *server_view, int *matches,
                        char **out_json) {
    VBQC_REQUIRE(wire_log);
    VBQC_REQUIRE(client_view);
    return guarded([&] {
        std::optional<std::string> recorded;
        if (server_view) recorded = server_view;
        const auto r = rounds::replay(wire_log, client_view, recorded);
        if (matches) *matches = r.ok() ? 1 : 0;
        if (out_json) {
            json j = {{"verdict", json::parse(r.verdict)},
                      {"recorded_verdict", json::parse(r.recorded_verdict)},
                      {"verdict_matches", r.verdict_matches},
                      {"server_view_matches", r.server_view_matches ? json(*r.server_view_matches) : json(nullptr)},
                      {"server_view", r.server_view}};
            *out_json = dup(j.dump(2));
        }
    });
}

}  // extern "C"
