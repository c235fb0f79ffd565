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

#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <future>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "error.hpp"
#include "json.hpp"
#include "persist.hpp"
#include "rounds.hpp"
#include "server.hpp"
#include "textfile.hpp"

namespace vbqc::harness {

namespace {

using rounds::Verdict;
using nlohmann::json;

std::string fmt(double x, int precision = 6) {
    std::ostringstream out;
    out.precision(precision);
    out << x;
    return out.str();
}

}  // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) fail(ErrorCode::input, "Wilson interval needs trials > 0");
    if (successes > trials) fail(ErrorCode::input, "more successes than trials");
    const double n = static_cast<double>(trials);
    const double p = successes / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {successes == 0 ? 0.0 : std::max(0.0, centre - half), successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

ChiSquare chi_square_homogeneity(const std::map<std::string, std::uint64_t> &a,
                                 const std::map<std::string, std::uint64_t> &b) {
    std::map<std::string, std::pair<double, double>> table;
    for (const auto &[k, c] : a) table[k].first += c;
    for (const auto &[k, c] : b) table[k].second += c;
    std::vector<std::pair<double, double>> cells;
    std::pair<double, double> pooled{0, 0};
    for (const auto &[k, c] : table) {
        if (c.first + c.second < 10) {
            pooled.first += c.first;
            pooled.second += c.second;
        } else {
            cells.push_back(c);
        }
    }
    if (pooled.first + pooled.second > 0) cells.push_back(pooled);
    double na = 0, nb = 0;
    for (auto [x, y] : cells) {
        na += x;
        nb += y;
    }
    ChiSquare out;
    if (cells.size() < 2 || na == 0 || nb == 0) return out;
    const double total = na + nb;
    for (auto [x, y] : cells) {
        const double col = x + y;
        const double ea = na * col / total, eb = nb * col / total;
        out.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    out.dof = static_cast<std::uint32_t>(cells.size() - 1);
    boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

std::uint64_t ExperimentConfig::expected() const {
    if (expected_output) return *expected_output;
    std::uint64_t y = 0;
    for (std::size_t i = 0; i < input_bits.size(); ++i) y |= static_cast<std::uint64_t>(input_bits[i] & 1) << i;
    return y;
}

void ExperimentConfig::validate() const {
    params.validate();
    pattern.validate();
    threat.noise.validate();
    if (trials < 1) fail(ErrorCode::input, "trials must be at least 1");
    if (params.k != pattern.colour_count()) {
        fail(ErrorCode::input, "k = " + std::to_string(params.k) + " but the pattern colouring has " +
                                   std::to_string(pattern.colour_count()) + " classes");
    }
    if (input_bits.size() != pattern.inputs.size()) {
        fail(ErrorCode::input, "pattern has " + std::to_string(pattern.inputs.size()) + " inputs, config gives " +
                                   std::to_string(input_bits.size()));
    }
    if (!expected_output && pattern.inputs.size() != pattern.outputs.size()) {
        fail(ErrorCode::input, "'expect' is required when inputs and outputs differ in number");
    }
    const double q = flip();
    if (!(q >= 0 && q <= 1)) fail(ErrorCode::input, "flip probability outside [0,1]");
    if (transport == wire::TransportKind::tcp && !address.empty()) wire::parse_address(address);
}

pattern::MeasurementPattern builtin_pattern(const std::string &name, std::optional<int> k) {
    if (name == "identity") return pattern::single_qubit_identity();
    if (name == "wire") return pattern::two_qubit_wire();
    if (name == "line") return pattern::three_qubit_line();
    if (name == "rotation") {
        if (!k) fail(ErrorCode::input, "rotation needs an angle index");
        return pattern::rotation(*k);
    }
    fail(ErrorCode::input, "unknown builtin pattern '" + name + "'");
}

ExperimentConfig parse_experiment(const std::string &text, const std::string &base_dir) {
    namespace fs = std::filesystem;
    ExperimentConfig c;
    auto resolve = [&](const std::string &p) { return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string(); };
    std::optional<std::uint32_t> k;
    bool have_rounds = false, have_w = false, have_input = false;
    for (const auto &line : text::read_lines(text, "vbqc-experiment", 1)) {
        const auto &a = line.args;
        const auto &kw = line.keyword;
        if (kw == "pattern") {
            text::expect_args(line, 2, 3);
            if (a[0] == "builtin") {
                std::optional<int> angle;
                if (a.size() == 3) angle = static_cast<int>(text::to_int(line, a[2]));
                c.pattern = builtin_pattern(a[1], angle);
                c.pattern_ref = "builtin " + a[1] + (angle ? " " + a[2] : "");
            } else if (a[0] == "file") {
                text::expect_args(line, 2, 2);
                c.pattern = pattern::load_pattern(resolve(a[1]));
                c.pattern_ref = a[1];
            } else {
                text::bad_line(line, "expected 'builtin' or 'file'");
            }
        } else if (kw == "rounds") {
            text::expect_args(line, 2, 2);
            c.params.d = static_cast<std::uint32_t>(text::to_uint(line, a[0]));
            c.params.t = static_cast<std::uint32_t>(text::to_uint(line, a[1]));
            have_rounds = true;
        } else if (kw == "threshold") {
            text::expect_args(line, 1, 1);
            c.params.w = static_cast<std::uint32_t>(text::to_uint(line, a[0]));
            have_w = true;
        } else if (kw == "colours") {
            text::expect_args(line, 1, 1);
            k = static_cast<std::uint32_t>(text::to_uint(line, a[0]));
        } else if (kw == "inherent") {
            text::expect_args(line, 1, 1);
            c.params.p = text::to_double(line, a[0]);
        } else if (kw == "flip") {
            text::expect_args(line, 1, 1);
            c.flip_probability = text::to_double(line, a[0]);
        } else if (kw == "noise-range") {
            text::expect_args(line, 2, 2);
            c.params.p_min = text::to_double(line, a[0]);
            c.params.p_max = text::to_double(line, a[1]);
            c.noise_range_given = true;
        } else if (kw == "input") {
            c.input_bits.clear();
            have_input = true;
            for (const auto &tok : a) {
                const auto b = text::to_uint(line, tok);
                if (b > 1) text::bad_line(line, "input bits are 0 or 1");
                c.input_bits.push_back(static_cast<Bit>(b));
            }
        } else if (kw == "expect") {
            text::expect_args(line, 1, 1);
            c.expected_output = text::to_uint(line, a[0]);
        } else if (kw == "trials") {
            text::expect_args(line, 1, 1);
            c.trials = text::to_uint(line, a[0]);
        } else if (kw == "seed") {
            text::expect_args(line, 1, 1);
            c.seed = text::to_uint(line, a[0]);
        } else if (kw == "threads") {
            text::expect_args(line, 1, 1);
            c.threads = static_cast<unsigned>(text::to_uint(line, a[0]));
        } else if (kw == "transport") {
            text::expect_args(line, 1, 2);
            if (a[0] == "inproc") {
                c.transport = wire::TransportKind::in_process;
            } else if (a[0] == "tcp") {
                c.transport = wire::TransportKind::tcp;
                if (a.size() == 2) c.address = a[1];
            } else {
                text::bad_line(line, "transport is inproc or tcp");
            }
        } else if (kw == "threat") {
            text::expect_args(line, 1, 1);
            c.threat = threat::load_threat(resolve(a[0]));
        } else if (kw == "report") {
            text::expect_args(line, 1, 1);
            c.report_path = resolve(a[0]);
        } else if (kw == "csv") {
            text::expect_args(line, 1, 1);
            c.csv_path = resolve(a[0]);
        } else if (kw == "capture") {
            text::expect_args(line, 1, 1);
            c.capture_prefix = resolve(a[0]);
        } else if (!threat::apply_threat_line(line, c.threat)) {
            text::bad_line(line, "unknown keyword '" + kw + "'");
        }
    }
    if (!have_rounds) fail(ErrorCode::parse, "experiment needs 'rounds d t'");
    if (!have_w) fail(ErrorCode::parse, "experiment needs 'threshold w'");
    c.params.k = k.value_or(static_cast<std::uint32_t>(c.pattern.colour_count()));
    if (!have_input) {
        c.input_bits.assign(c.pattern.inputs.size(), 0);
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment(const std::string &path) {
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_experiment(text::read_file(path), dir.empty() ? "." : dir.string());
}

ComparisonRow compare_rate(std::string quantity, std::uint64_t successes, std::uint64_t trials, double bound) {
    ComparisonRow row;
    row.quantity = std::move(quantity);
    row.successes = successes;
    row.trials = trials;
    row.rate = trials ? static_cast<double>(successes) / trials : 0;
    row.wilson = wilson_interval(successes, trials);
    row.bound = bound;
    row.violation = row.wilson.lo > bound;
    return row;
}

std::uint64_t ExperimentReport::abort_count() const {
    std::uint64_t s = 0;
    for (const auto &[k, c] : abort_counts) s += c;
    return s;
}

bool ExperimentReport::violation() const {
    return std::any_of(comparisons.begin(), comparisons.end(), [](const ComparisonRow &r) { return r.violation; });
}

namespace {

std::vector<ComparisonRow> noise_rows(const ExperimentReport &r) {
    std::vector<ComparisonRow> rows;
    if (!r.honest_device || !r.analytic.noise_range_known) return rows;
    const auto &p = r.params;
    const double omega = p.omega(), tau = p.tau(), n = p.n();
    if (omega > p.p_max) {
        const auto it = r.abort_counts.find("too_many_failed_tests");
        const std::uint64_t aborts = it == r.abort_counts.end() ? 0 : it->second;
        rows.push_back(compare_rate("abort_failed_tests", aborts, r.trials, bounds::epsilon_rej(omega, p.p_max, tau, n)));
    }
    if (omega < p.p_min) {
        rows.push_back(compare_rate("accept", r.accept_count, r.trials,
                                    bounds::epsilon_accept_under_excess_noise(omega, p.p_min, tau, n)));
    }
    return rows;
}

struct TrialSummary {
    Verdict::Status status = Verdict::Status::abort;
    Verdict::Reason reason = Verdict::Reason::none;
    std::uint64_t output = 0;
    std::uint32_t c_fail = 0;
    std::uint32_t redo = 0;
};

TrialSummary summarise(const rounds::ProtocolRun &run) {
    TrialSummary s{run.verdict.status, run.verdict.reason, run.verdict.output, run.verdict.c_fail, 0};
    for (const auto &t : run.transcripts) s.redo += t.redo_count;
    return s;
}

std::unique_ptr<wire::TcpTransport> connect_with_retry(const std::string &address, wire::WireLog *log) {
    const auto [host, port] = wire::parse_address(address);
    for (int attempt = 0;; ++attempt) {
        try {
            return wire::TcpTransport::connect(host, port, log);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::session || attempt >= 50) throw;
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    }
}

class Runner {
public:
    Runner(const ExperimentConfig &config, const ProtocolParams &params) : c_(config), params_(params) {}

    TrialSummary trial(std::uint64_t i, const std::string &address, Capture *capture) const {
        const Rng rng = Rng(c_.seed).split(i);
        wire::WireLog log;
        rounds::ServerView view;
        rounds::ProtocolRun run;
        if (c_.transport == wire::TransportKind::in_process) {
            rounds::SessionHooks hooks;
            if (capture) hooks = {&log, &view};
            run = rounds::run_protocol(params_, c_.pattern, c_.input_bits, c_.threat, rng, c_.flip(), hooks);
        } else {
            auto transport = connect_with_retry(address, capture ? &log : nullptr);
            rounds::ClientOptions options{c_.flip(), c_.threat.client_redo};
            rounds::Client client(c_.pattern, params_, c_.input_bits, rng, options);
            run = client.run(*transport);
            if (capture) view = rounds::ServerView::from_log(log);
        }
        if (capture) {
            capture->wire_log = log.to_text();
            capture->client_view = rounds::client_view_jsonl(run, params_, c_.pattern, c_.input_bits);
            capture->server_view = view.to_jsonl();
        }
        return summarise(run);
    }

private:
    const ExperimentConfig &c_;
    ProtocolParams params_;
};

std::vector<TrialSummary> run_parallel(const Runner &runner, std::uint64_t trials, unsigned threads,
                                       Capture *capture) {
    std::vector<TrialSummary> results(trials);
    std::atomic<std::uint64_t> next{0};
    std::mutex error_mutex;
    std::optional<std::pair<std::uint64_t, std::exception_ptr>> first_error;
    auto work = [&] {
        for (std::uint64_t i = next++; i < trials; i = next++) {
            try {
                results[i] = runner.trial(i, {}, i == 0 ? capture : nullptr);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error || i < first_error->first) first_error = {i, std::current_exception()};
                next = trials;
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto &th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error->second);
    return results;
}

}  // namespace

std::uint64_t serve_experiment(const ExperimentConfig &config, std::uint16_t port,
                               const std::function<void(std::uint16_t)> &ready) {
    config.validate();
    wire::TcpListener listener(port);
    if (ready) ready(listener.port());
    for (std::uint64_t i = 0; i < config.trials; ++i) {
        wire::Socket connection = listener.accept();
        rounds::ServerEndpoint server(config.pattern.graph, config.threat, config.params, config.pattern,
                                      Rng(config.seed).split(i));
        wire::serve(connection, server);
    }
    return config.trials;
}

std::vector<ComparisonRow> compare_bound_vs_empirical(const ExperimentReport &report,
                                                      const bounds::BoundReport &bound) {
    std::vector<ComparisonRow> rows;
    rows.push_back(compare_rate("accepted_but_wrong", report.fail_count, report.trials, bound.epsilon_ver));
    for (auto &r : noise_rows(report)) rows.push_back(std::move(r));
    return rows;
}

ExperimentReport run_experiment(const ExperimentConfig &config) {
    config.validate();
    ExperimentReport report;
    report.pattern_ref = config.pattern_ref;
    report.threat = threat::format_threat(config.threat);
    report.honest_device = config.threat.attack.empty() && !config.threat.em;
    report.seed = config.seed;
    report.trials = config.trials;
    report.expected_output = config.expected();

    ProtocolParams params = config.params;
    if (config.threat.noise.is_pauli()) {
        report.analytic.trap_failure = threat::trap_failure_summary(config.threat.noise, config.pattern).mean;
    }
    if (!config.noise_range_given) {
        const double q = report.analytic.trap_failure.value_or(0.0);
        params.p_min = params.p_max = q;
        report.analytic.noise_range_known = config.threat.noise.kind == threat::NoiseModel::Kind::none ||
                                            config.threat.noise.is_pauli();
    }
    report.params = params;

    if (params.in_guarantee_region()) {
        report.analytic.bound = bounds::minimize_epsilon_ver(params);
    } else {
        report.analytic.note = "omega = " + fmt(params.omega()) + " lies outside (0, " +
                               fmt(noise_ceiling(params.p) / params.k) + "); eps_ver not computed";
    }
    if (!report.analytic.noise_range_known) {
        if (!report.analytic.note.empty()) report.analytic.note += "; ";
        report.analytic.note += "no exact trap failure rate for this noise model; give 'noise-range' for rejection bounds";
    } else if (params.omega() < params.p_min) {
        report.analytic.accept_bound =
            bounds::epsilon_accept_under_excess_noise(params.omega(), params.p_min, params.tau(), params.n());
    }

    Runner runner(config, params);
    Capture capture;
    Capture *cap = config.capture_prefix ? &capture : nullptr;
    std::vector<TrialSummary> results;
    if (config.transport == wire::TransportKind::in_process) {
        const unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
        results = run_parallel(runner, config.trials, threads, cap);
    } else {
        std::string address = config.address;
        std::future<std::uint64_t> server;
        if (address.empty()) {
            std::promise<std::uint16_t> port;
            auto bound = port.get_future();
            ExperimentConfig server_config = config;
            server_config.params = params;
            server = std::async(std::launch::async, [server_config, port = std::move(port)]() mutable {
                return serve_experiment(server_config, 0, [&](std::uint16_t p) { port.set_value(p); });
            });
            try {
                address = "127.0.0.1:" + std::to_string(bound.get());
            } catch (const std::future_error &) {
                server.get();
                throw;
            }
        }
        results.resize(config.trials);
        std::uint64_t i = 0;
        try {
            for (; i < config.trials; ++i) results[i] = runner.trial(i, address, i == 0 ? cap : nullptr);
        } catch (...) {
            if (server.valid()) {
                for (++i; i < config.trials; ++i) connect_with_retry(address, nullptr);
                try {
                    server.get();
                } catch (...) {
                }
            }
            throw;
        }
        if (server.valid()) server.get();
    }
    if (cap) report.capture = capture;

    const std::uint64_t expected = report.expected_output;
    for (const auto &r : results) {
        ++report.c_fail_histogram[r.c_fail];
        report.failed_test_rounds += r.c_fail;
        report.redo_count += r.redo;
        if (r.status == Verdict::Status::ok) {
            ++report.accept_count;
            if (r.output != expected) ++report.fail_count;
            ++report.verdicts["ok:" + std::to_string(r.output)];
        } else {
            const std::string reason = rounds::reason_name(r.reason);
            ++report.abort_counts[reason];
            ++report.verdicts["abort:" + reason];
        }
    }
    report.test_rounds = config.trials * params.t;
    const bool clean = config.threat.honest() && config.flip() == 0 && params.p == 0;
    report.anomaly = clean && (report.abort_count() > 0 || report.fail_count > 0);
    report.comparisons = report.analytic.bound ? compare_bound_vs_empirical(report, *report.analytic.bound)
                                               : noise_rows(report);
    return report;
}

namespace {

json interval_json(const Interval &i) { return json::array({i.lo, i.hi}); }

json rate_json(std::uint64_t k, std::uint64_t n) {
    return {{"count", k}, {"rate", n ? static_cast<double>(k) / n : 0.0}, {"wilson95", interval_json(wilson_interval(k, n))}};
}

}  // namespace

std::string report_json(const ExperimentReport &r) {
    const auto &p = r.params;
    json j;
    j["schema"] = 1;
    j["pattern"] = r.pattern_ref;
    j["params"] = {{"n", p.n()},     {"d", p.d},         {"t", p.t},         {"w", p.w},
                   {"k", p.k},       {"p", p.p},         {"p_min", p.p_min}, {"p_max", p.p_max},
                   {"delta", p.delta()}, {"tau", p.tau()}, {"omega", p.omega()}};
    j["threat"] = r.threat;
    j["honest_device"] = r.honest_device;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["expected_output"] = r.expected_output;
    j["accept"] = rate_json(r.accept_count, r.trials);
    j["abort"] = rate_json(r.abort_count(), r.trials);
    j["accepted_but_wrong"] = rate_json(r.fail_count, r.trials);
    json aborts = json::object();
    for (const auto &[k, c] : r.abort_counts) aborts[k] = c;
    j["abort_counts"] = aborts;
    json hist = json::object();
    for (const auto &[k, c] : r.c_fail_histogram) hist[std::to_string(k)] = c;
    j["c_fail_histogram"] = hist;
    j["verdicts"] = r.verdicts;
    j["test_round_failures"] = r.test_rounds ? rate_json(r.failed_test_rounds, r.test_rounds) : json(nullptr);
    j["redo_count"] = r.redo_count;

    json analytic = json::object();
    analytic["trap_failure"] = r.analytic.trap_failure ? json(*r.analytic.trap_failure) : json(nullptr);
    analytic["accept_bound"] = r.analytic.accept_bound ? json(*r.analytic.accept_bound) : json(nullptr);
    analytic["bound"] = r.analytic.bound ? json::parse(bounds::to_json(*r.analytic.bound)) : json(nullptr);
    analytic["note"] = r.analytic.note;
    j["analytic"] = analytic;

    json rows = json::array();
    for (const auto &row : r.comparisons) {
        rows.push_back({{"quantity", row.quantity},
                        {"count", row.successes},
                        {"trials", row.trials},
                        {"rate", row.rate},
                        {"wilson95", interval_json(row.wilson)},
                        {"bound", row.bound},
                        {"verdict", row.violation ? "VIOLATION" : "OK"}});
    }
    j["comparisons"] = rows;
    j["violation"] = r.violation();
    j["anomaly"] = r.anomaly;
    return j.dump(2) + "\n";
}

std::string report_csv(const ExperimentReport &r) {
    std::ostringstream out;
    out.precision(10);
    out << "quantity,count,trials,rate,wilson_lo,wilson_hi,bound,verdict\n";
    auto line = [&](const std::string &q, std::uint64_t k, std::uint64_t n, std::optional<const ComparisonRow *> row) {
        const auto w = wilson_interval(k, n);
        out << q << ',' << k << ',' << n << ',' << static_cast<double>(k) / n << ',' << w.lo << ',' << w.hi << ',';
        if (row) out << (*row)->bound << ',' << ((*row)->violation ? "VIOLATION" : "OK");
        else out << ',';
        out << '\n';
    };
    std::map<std::string, const ComparisonRow *> by_name;
    for (const auto &row : r.comparisons) by_name[row.quantity] = &row;
    line("accept", r.accept_count, r.trials, std::nullopt);
    line("abort", r.abort_count(), r.trials, std::nullopt);
    if (r.test_rounds) line("test_round_failures", r.failed_test_rounds, r.test_rounds, std::nullopt);
    for (const auto &row : r.comparisons) line(row.quantity, row.successes, row.trials, &row);
    return out.str();
}

std::string report_summary(const ExperimentReport &r) {
    std::ostringstream out;
    out << "pattern " << r.pattern_ref << ", " << r.params.describe() << ", trials " << r.trials << ", seed " << r.seed
        << '\n';
    out << "accepted " << r.accept_count << " (rate " << fmt(static_cast<double>(r.accept_count) / r.trials)
        << "), accepted but wrong " << r.fail_count << ", aborted " << r.abort_count() << '\n';
    for (const auto &[k, c] : r.abort_counts) out << "  abort " << k << ": " << c << '\n';
    if (r.test_rounds) {
        out << "test rounds failed " << r.failed_test_rounds << " of " << r.test_rounds << '\n';
    }
    if (r.redo_count) out << "redo requests " << r.redo_count << '\n';
    if (r.analytic.trap_failure) out << "exact per-test failure rate " << fmt(*r.analytic.trap_failure) << '\n';
    if (r.analytic.bound) {
        const auto &b = *r.analytic.bound;
        out << "eps_ver " << fmt(b.epsilon_ver) << ", eps_rej " << fmt(b.epsilon_rej) << ", eps_cor "
            << fmt(b.epsilon_cor) << ", eps_sec " << fmt(b.epsilon_sec) << '\n';
    }
    if (!r.analytic.note.empty()) out << r.analytic.note << '\n';
    if (r.anomaly) out << "ANOMALY: honest noiseless run did not always accept the expected output\n";
    for (const auto &row : r.comparisons) {
        out << row.quantity << ": " << fmt(row.rate) << " [" << fmt(row.wilson.lo) << ", " << fmt(row.wilson.hi)
            << "] vs bound " << fmt(row.bound) << "  " << (row.violation ? "VIOLATION" : "OK") << '\n';
    }
    return out.str();
}

void write_outputs(const ExperimentReport &report, const ExperimentConfig &config) {
    if (config.report_path) text::write_file(*config.report_path, report_json(report));
    if (config.csv_path) text::write_file(*config.csv_path, report_csv(report));
    if (config.capture_prefix && report.capture) {
        text::write_file(*config.capture_prefix + ".wire", report.capture->wire_log);
        text::write_file(*config.capture_prefix + ".client.jsonl", report.capture->client_view);
        text::write_file(*config.capture_prefix + ".server.jsonl", report.capture->server_view);
    }
}

}  // namespace vbqc::harness
