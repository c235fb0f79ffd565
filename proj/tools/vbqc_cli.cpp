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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vbqc/vbqc.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFlagged = 1;
constexpr int kExitUsage = 2;

struct Failure {
    vbqc_status status;
    std::string message;
};

void check(vbqc_status s) {
    if (s != VBQC_OK) throw Failure{s, vbqc_last_error()};
}

/// Owns a char* from the library.
std::string take(char *s) {
    std::string out = s ? s : "";
    vbqc_string_free(s);
    return out;
}

template <typename T, void (*Free)(T *)>
struct Deleter {
    void operator()(T *p) const { Free(p); }
};
using Pattern = std::unique_ptr<vbqc_pattern, Deleter<vbqc_pattern, vbqc_pattern_free>>;
using Experiment = std::unique_ptr<vbqc_experiment, Deleter<vbqc_experiment, vbqc_experiment_free>>;
using Report = std::unique_ptr<vbqc_report, Deleter<vbqc_report, vbqc_report_free>>;
using Distribution = std::unique_ptr<vbqc_distribution, Deleter<vbqc_distribution, vbqc_distribution_free>>;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{VBQC_ERR_IO, "cannot read " + path};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Failure{VBQC_ERR_IO, "cannot write " + path};
}

/// A pattern file, or a builtin name (identity, wire, line, rotation).
Pattern open_pattern(const std::string &ref, int angle) {
    vbqc_pattern *p = nullptr;
    if (std::filesystem::exists(ref)) check(vbqc_pattern_load(ref.c_str(), &p));
    else check(vbqc_pattern_builtin(ref.c_str(), angle, &p));
    return Pattern(p);
}

std::vector<uint8_t> parse_bits(const std::string &s) {
    std::vector<uint8_t> bits;
    for (char c : s) {
        if (c == '0' || c == '1') bits.push_back(static_cast<uint8_t>(c - '0'));
        else if (c != ',' && c != ' ') throw Failure{VBQC_ERR_INPUT, "input bits are written like 01 or 0,1"};
    }
    return bits;
}

struct RunOptions {
    std::string config;
    std::optional<uint64_t> seed, trials;
    std::optional<unsigned> threads;
    std::string transport = "inproc";
    std::optional<uint16_t> listen;
    std::string connect;
    bool json_out = false;
};

void on_ready(uint16_t port, void *) {
    std::cout << "listening on 127.0.0.1:" << port << std::endl;
}

int cmd_run(const RunOptions &o) {
    vbqc_experiment *raw = nullptr;
    check(vbqc_experiment_load(o.config.c_str(), &raw));
    Experiment e(raw);
    if (o.seed) check(vbqc_experiment_set_seed(e.get(), *o.seed));
    if (o.trials) check(vbqc_experiment_set_trials(e.get(), *o.trials));
    if (o.threads) check(vbqc_experiment_set_threads(e.get(), *o.threads));
    if (o.listen) {
        check(vbqc_experiment_serve(e.get(), *o.listen, on_ready, nullptr));
        std::cout << "served all sessions\n";
        return kExitOk;
    }
    if (!o.connect.empty()) check(vbqc_experiment_set_transport(e.get(), VBQC_TRANSPORT_TCP, o.connect.c_str()));
    else if (o.transport == "tcp") check(vbqc_experiment_set_transport(e.get(), VBQC_TRANSPORT_TCP, nullptr));
    vbqc_report *rr = nullptr;
    check(vbqc_experiment_run(e.get(), &rr));
    Report r(rr);
    check(vbqc_report_write(r.get(), e.get()));
    char *text = nullptr;
    if (o.json_out) check(vbqc_report_json(r.get(), &text));
    else check(vbqc_report_summary(r.get(), &text));
    std::cout << take(text);
    return vbqc_report_violation(r.get()) || vbqc_report_anomaly(r.get()) ? kExitFlagged : kExitOk;
}

struct BoundsOptions {
    uint32_t k = 2;
    double p = 0;
    bool regions = false;
    uint32_t d = 0, t = 0, w = 0;
    double p_max = 0;
    std::optional<double> omega;
    bool evaluate = false;
    double n = 0, delta = 0.5, tau = 0.5, phi = 0, eps1 = 0, eps2 = 0, eps3 = 0;
    std::string sweep;
    double from = 0, to = 0;
    uint32_t steps = 10;
    std::string csv;
};

void emit(const std::string &text, const std::string &path) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_file(path, text);
        std::cout << "wrote " << path << '\n';
    }
}

int cmd_bounds(const BoundsOptions &o) {
    if (o.regions) {
        double lo = 0, hi = 0;
        check(vbqc_threshold_region(o.k, o.p, &lo, &hi));
        const double c = hi * o.k;
        std::cout << "k = " << o.k << ", p = " << o.p << '\n';
        std::cout << "(2p-1)/(2p-2) = " << c << '\n';
        std::cout << "omega ceiling (1/k)(2p-1)/(2p-2) = " << hi << '\n';
        std::cout << "admissible omega = w/t in (" << lo << ", " << hi << ")\n";
        return kExitOk;
    }
    if (o.evaluate) {
        char *out = nullptr;
        check(vbqc_bound_evaluate(o.n, o.delta, o.tau, o.k, o.p, o.phi, o.eps1, o.eps2, o.eps3, &out));
        std::cout << take(out) << '\n';
        return kExitOk;
    }
    const vbqc_params params{o.d, o.t, o.w, o.k, o.p, 0, o.p_max};
    if (o.d == 0 || o.t == 0) throw Failure{VBQC_ERR_INPUT, "--d and --t are required (or use --regions / --evaluate)"};
    if (!o.sweep.empty()) {
        char *out = nullptr;
        check(vbqc_bound_sweep(&params, o.sweep.c_str(), o.from, o.to, o.steps, &out));
        emit(take(out), o.csv);
        return kExitOk;
    }
    char *out = nullptr;
    check(vbqc_bound_minimize(&params, o.omega.value_or(NAN), &out));
    const auto j = json::parse(take(out));
    std::cout << j.dump(2) << '\n';
    if (!o.csv.empty()) {
        char *row = nullptr;
        const double om = o.omega.value_or(static_cast<double>(o.w) / o.t);
        check(vbqc_bound_sweep(&params, "omega", om, om, 1, &row));
        emit(take(row), o.csv);
    }
    return kExitOk;
}

struct TuneOptions {
    uint32_t d = 1, t = 1, w = 0, k = 2;
    double p = 0, p_max = 0, target_sec = 1e-3, target_cor = 1e-3;
};

int cmd_tune(const TuneOptions &o) {
    const vbqc_params shape{o.d, o.t, o.w, o.k, o.p, 0, o.p_max};
    char *out = nullptr;
    check(vbqc_tune_n(&shape, o.target_sec, o.target_cor, o.p_max, &out));
    const auto j = json::parse(take(out));
    std::cout << "n = " << j["n"] << " (d = " << j["d"] << ", t = " << j["t"] << ", w = " << j["w"]
              << ", w implied " << j["w_implied"] << ")\n";
    std::cout << "eps_ver = " << j["report"]["epsilon_ver"] << ", eps_rej = " << j["report"]["epsilon_rej"]
              << ", eps_cor = " << j["report"]["epsilon_cor"] << ", eps_sec = " << j["report"]["epsilon_sec"] << '\n';
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_color(const std::string &ref, int angle) {
    const auto p = open_pattern(ref, angle);
    char *out = nullptr;
    check(vbqc_pattern_colour(p.get(), &out));
    const auto j = json::parse(take(out));
    std::cout << "K=" << j["k"] << '\n';
    for (std::size_t c = 0; c < j["classes"].size(); ++c) {
        std::cout << "class " << c << ":";
        for (const auto &v : j["classes"][c]) std::cout << ' ' << v;
        std::cout << '\n';
    }
    std::cout << "greedy colouring " << j["problem"].get<std::string>() << "; pattern colouring ("
              << j["stored"]["k"] << " classes) " << j["stored"]["problem"].get<std::string>() << '\n';
    return j["valid"].get<bool>() && j["stored"]["valid"].get<bool>() ? kExitOk : kExitFlagged;
}

struct EnumerateOptions {
    std::string pattern;
    int angle = 1;
    std::string kind = "computation";
    std::string input;
    std::vector<std::string> deviation;
    int colour = -1;
    bool blindness = false;
};

std::size_t input_count(const vbqc_pattern *p) {
    char *text = nullptr;
    check(vbqc_pattern_format(p, &text));
    std::istringstream in(take(text));
    std::size_t count = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("inputs", 0) != 0) continue;
        std::istringstream ls(line.substr(6));
        for (std::string tok; ls >> tok;) ++count;
    }
    return count;
}

Distribution enumerate(const vbqc_pattern *p, vbqc_round_kind kind, const std::vector<uint8_t> &input,
                       const std::string &deviation, int colour) {
    vbqc_distribution *d = nullptr;
    check(vbqc_enumerate(p, kind, input.data(), input.size(), deviation.empty() ? nullptr : deviation.c_str(), colour,
                         &d));
    return Distribution(d);
}

int cmd_blindness(const vbqc_pattern *base) {
    const std::size_t n = vbqc_pattern_vertex_count(base);
    vbqc_distribution *first = nullptr;
    Distribution reference;
    const std::size_t inputs = input_count(base);
    std::size_t compared = 0, differing = 0;
    auto compare = [&](Distribution d, const std::string &label) {
        if (!reference) {
            reference = std::move(d);
            first = reference.get();
            return;
        }
        char *exact = nullptr;
        double value = 0;
        check(vbqc_distribution_tv(first, d.get(), &exact, &value));
        const auto tv = take(exact);
        ++compared;
        if (tv != "0") {
            ++differing;
            std::cout << label << ": TV = " << tv << '\n';
        }
    };
    const std::size_t angle_sets = std::size_t{1} << (3 * n);
    for (std::size_t a = 0; a < angle_sets; ++a) {
        std::vector<uint8_t> angles(n);
        for (std::size_t v = 0; v < n; ++v) angles[v] = static_cast<uint8_t>((a >> (3 * v)) & 7);
        vbqc_pattern *raw = nullptr;
        check(vbqc_pattern_with_angles(base, angles.data(), n, &raw));
        Pattern p(raw);
        for (std::size_t x = 0; x < (std::size_t{1} << inputs); ++x) {
            std::vector<uint8_t> bits(inputs);
            for (std::size_t i = 0; i < inputs; ++i) bits[i] = static_cast<uint8_t>((x >> i) & 1);
            compare(enumerate(p.get(), VBQC_ROUND_COMPUTATION, bits, "", -1),
                    "angles #" + std::to_string(a) + " input #" + std::to_string(x));
        }
    }
    std::vector<uint8_t> zeros(inputs, 0);
    compare(enumerate(base, VBQC_ROUND_TEST, zeros, "", -1), "test round");
    std::cout << "compared " << compared << " delta distributions against the first; " << differing
              << " differ\n";
    return differing ? kExitFlagged : kExitOk;
}

int cmd_enumerate(const EnumerateOptions &o) {
    const auto p = open_pattern(o.pattern, o.angle);
    if (o.blindness) return cmd_blindness(p.get());
    if (o.kind != "computation" && o.kind != "test") throw Failure{VBQC_ERR_INPUT, "--kind is computation or test"};
    std::string deviation;
    for (const auto &d : o.deviation) deviation += d + "\n";
    const auto d = enumerate(p.get(), o.kind == "test" ? VBQC_ROUND_TEST : VBQC_ROUND_COMPUTATION,
                             o.input.empty() ? std::vector<uint8_t>(input_count(p.get()), 0) : parse_bits(o.input),
                             deviation, o.colour);
    char *out = nullptr;
    check(vbqc_distribution_json(d.get(), &out));
    auto j = json::parse(take(out));
    std::cout << "leaves " << j["leaves"] << ", total probability " << j["total"]["exact"].get<std::string>() << '\n';
    std::cout << "delta marginal uniform: " << (j["delta_uniform"].get<bool>() ? "yes" : "no") << '\n';
    if (j.contains("fail_probability")) {
        std::cout << "Pr[trap check fails] = " << j["fail_probability"]["exact"].get<std::string>() << " ("
                  << j["fail_probability"]["value"] << ")\n";
    } else {
        for (const auto &[y, v] : j["outputs"].items()) {
            std::cout << "Pr[y = " << y << "] = " << v["exact"].get<std::string>() << " (" << v["value"] << ")\n";
        }
    }
    return kExitOk;
}

struct ReplayOptions {
    std::string log;
    std::string client_view, server_view;
    bool show_server_view = false;
};

int cmd_replay(const ReplayOptions &o) {
    std::string client = o.client_view, server = o.server_view;
    const std::string suffix = ".wire";
    if (o.log.size() > suffix.size() && o.log.compare(o.log.size() - suffix.size(), suffix.size(), suffix) == 0) {
        const std::string prefix = o.log.substr(0, o.log.size() - suffix.size());
        if (client.empty()) client = prefix + ".client.jsonl";
        if (server.empty() && std::filesystem::exists(prefix + ".server.jsonl")) server = prefix + ".server.jsonl";
    }
    if (client.empty()) throw Failure{VBQC_ERR_INPUT, "--client-view is required for this log name"};
    const auto log_text = read_file(o.log);
    const auto client_text = read_file(client);
    std::optional<std::string> server_text;
    if (!server.empty()) server_text = read_file(server);
    int matches = 0;
    char *out = nullptr;
    check(vbqc_replay(log_text.c_str(), client_text.c_str(), server_text ? server_text->c_str() : nullptr, &matches,
                      &out));
    const auto j = json::parse(take(out));
    std::cout << "recomputed verdict " << j["verdict"].dump() << '\n';
    std::cout << "recorded verdict   " << j["recorded_verdict"].dump() << '\n';
    std::cout << "verdict " << (j["verdict_matches"].get<bool>() ? "matches" : "DIFFERS");
    if (!j["server_view_matches"].is_null()) {
        std::cout << "; server view " << (j["server_view_matches"].get<bool>() ? "matches" : "DIFFERS");
    }
    std::cout << '\n';
    if (o.show_server_view) std::cout << j["server_view"].get<std::string>();
    return matches ? kExitOk : kExitFlagged;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"vbqc: verifiable blind quantum computation lab"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(vbqc_version()));

    RunOptions run;
    auto *run_cmd = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
    run_cmd->add_option("config", run.config, "Experiment file (vbqc-experiment 1)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "Override the seed");
    run_cmd->add_option("--trials", run.trials, "Override the trial count");
    run_cmd->add_option("--threads", run.threads, "Worker threads (0: all cores)");
    run_cmd->add_option("--transport", run.transport, "inproc or tcp")->check(CLI::IsMember({"inproc", "tcp"}));
    auto *listen = run_cmd->add_option("--listen", run.listen, "Serve the sessions on this port and exit");
    run_cmd->add_option("--connect", run.connect, "Run the client against host:port")->excludes(listen);
    run_cmd->add_flag("--json", run.json_out, "Print the JSON report instead of the summary");

    BoundsOptions bo;
    auto *bounds_cmd = app.add_subcommand("bounds", "Evaluate, minimise or sweep the security bounds");
    bounds_cmd->add_option("--k", bo.k, "Colour classes");
    bounds_cmd->add_option("--p", bo.p, "Inherent error of the computation");
    bounds_cmd->add_flag("--regions", bo.regions, "Print the admissible threshold region");
    bounds_cmd->add_option("--d", bo.d, "Computation rounds");
    bounds_cmd->add_option("--t", bo.t, "Test rounds");
    bounds_cmd->add_option("--w", bo.w, "Threshold");
    bounds_cmd->add_option("--p-max", bo.p_max, "Largest honest per-test failure rate");
    bounds_cmd->add_option("--omega", bo.omega, "Target w/t instead of w/t from --w");
    bounds_cmd->add_flag("--evaluate", bo.evaluate, "Evaluate one free-parameter assignment");
    bounds_cmd->add_option("--n", bo.n, "Rounds (with --evaluate)");
    bounds_cmd->add_option("--delta", bo.delta, "d/n (with --evaluate)");
    bounds_cmd->add_option("--tau", bo.tau, "t/n (with --evaluate)");
    bounds_cmd->add_option("--phi", bo.phi, "phi (with --evaluate)");
    bounds_cmd->add_option("--eps1", bo.eps1, "eps1 (with --evaluate)");
    bounds_cmd->add_option("--eps2", bo.eps2, "eps2 (with --evaluate)");
    bounds_cmd->add_option("--eps3", bo.eps3, "eps3 (with --evaluate)");
    bounds_cmd->add_option("--sweep", bo.sweep, "Sweep n or omega")->check(CLI::IsMember({"n", "omega"}));
    bounds_cmd->add_option("--from", bo.from, "Sweep start");
    bounds_cmd->add_option("--to", bo.to, "Sweep end");
    bounds_cmd->add_option("--steps", bo.steps, "Sweep points");
    bounds_cmd->add_option("--csv", bo.csv, "Write CSV here");

    TuneOptions to;
    auto *tune_cmd = app.add_subcommand("tune", "Smallest n meeting eps_sec and eps_cor targets");
    tune_cmd->add_option("--d", to.d, "Computation rounds of the shape (ratio only)");
    tune_cmd->add_option("--t", to.t, "Test rounds of the shape (ratio only)");
    tune_cmd->add_option("--w", to.w, "Threshold of the shape (omega = w/t)")->required();
    tune_cmd->add_option("--k", to.k, "Colour classes");
    tune_cmd->add_option("--p", to.p, "Inherent error");
    tune_cmd->add_option("--p-max", to.p_max, "Largest honest per-test failure rate");
    tune_cmd->add_option("--target-sec", to.target_sec, "Target for eps_sec");
    tune_cmd->add_option("--target-cor", to.target_cor, "Target for eps_cor");

    std::string color_ref;
    int color_angle = 1;
    auto *color_cmd = app.add_subcommand("color", "Greedy colouring of a pattern graph");
    color_cmd->add_option("pattern", color_ref, "Pattern file or builtin (identity, wire, line, rotation)")->required();
    color_cmd->add_option("--angle", color_angle, "Angle index for the rotation builtin");

    EnumerateOptions eo;
    auto *enum_cmd = app.add_subcommand("enumerate", "Exact distribution of one round by full enumeration");
    enum_cmd->add_option("pattern", eo.pattern, "Pattern file or builtin")->required();
    enum_cmd->add_option("--angle", eo.angle, "Angle index for the rotation builtin");
    enum_cmd->add_option("--kind", eo.kind, "computation or test");
    enum_cmd->add_option("--input", eo.input, "Input bits, e.g. 01");
    enum_cmd->add_option("--deviation", eo.deviation, "Threat 'on' line (repeatable)");
    enum_cmd->add_option("--colour", eo.colour, "Fix the trap colour of a test round");
    enum_cmd->add_flag("--blindness", eo.blindness, "Compare delta distributions over all angles, inputs and kinds");

    ReplayOptions ro;
    auto *replay_cmd = app.add_subcommand("replay", "Re-verify a captured session from its wire log");
    replay_cmd->add_option("log", ro.log, "Wire log (capture prefix + .wire)")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--client-view", ro.client_view, "Client view (default: <prefix>.client.jsonl)");
    replay_cmd->add_option("--server-view", ro.server_view, "Recorded server view to compare");
    replay_cmd->add_flag("--show-server-view", ro.show_server_view, "Print the rebuilt server view");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*bounds_cmd) return cmd_bounds(bo);
        if (*tune_cmd) return cmd_tune(to);
        if (*color_cmd) return cmd_color(color_ref, color_angle);
        if (*enum_cmd) return cmd_enumerate(eo);
        if (*replay_cmd) return cmd_replay(ro);
    } catch (const Failure &f) {
        std::cerr << "error (" << vbqc_status_name(f.status) << "): " << f.message << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
