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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "params.hpp"
#include "pattern.hpp"
#include "threat.hpp"
#include "transport.hpp"

namespace vbqc::harness {

inline constexpr double kWilsonZ = 1.959964;

struct Interval {
    double lo = 0, hi = 1;
};

/// Wilson score interval for `successes` out of `trials` (trials > 0).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ);

struct ChiSquare {
    double statistic = 0;
    std::uint32_t dof = 0;
    double p_value = 1;
};

/// Homogeneity test of two categorical samples. Categories with a pooled
/// count below 10 are merged into one bucket first.
ChiSquare chi_square_homogeneity(const std::map<std::string, std::uint64_t> &a,
                                 const std::map<std::string, std::uint64_t> &b);

struct ExperimentConfig {
    std::string pattern_ref = "builtin wire";
    pattern::MeasurementPattern pattern = pattern::two_qubit_wire();
    ProtocolParams params;
    bool noise_range_given = false;  // otherwise p_min = p_max = exact trap failure rate
    threat::ThreatSpec threat;
    std::vector<Bit> input_bits{0};
    std::optional<std::uint64_t> expected_output;  // default: the input bits when shapes agree
    std::optional<double> flip_probability;        // default: params.p
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;  // 0: hardware concurrency
    wire::TransportKind transport = wire::TransportKind::in_process;
    std::string address;  // tcp: empty starts a loopback server in-process
    std::optional<std::string> report_path, csv_path, capture_prefix;

    double flip() const { return flip_probability.value_or(params.p); }
    std::uint64_t expected() const;
    /// Throws Error(input) on an inconsistent configuration.
    void validate() const;
};

/// "vbqc-experiment 1" text. Relative file references resolve against
/// `base_dir`. Threat lines may appear inline.
ExperimentConfig parse_experiment(const std::string &text, const std::string &base_dir = ".");
ExperimentConfig load_experiment(const std::string &path);

/// Builtins: identity, wire, line, rotation K.
pattern::MeasurementPattern builtin_pattern(const std::string &name, std::optional<int> k = std::nullopt);

struct ComparisonRow {
    std::string quantity;
    std::uint64_t successes = 0, trials = 0;
    double rate = 0;
    Interval wilson;
    double bound = 1;
    bool violation = false;
};

/// Empirical rate against an analytic bound: VIOLATION iff the Wilson lower
/// edge exceeds the bound.
ComparisonRow compare_rate(std::string quantity, std::uint64_t successes, std::uint64_t trials, double bound);

struct Analytic {
    std::optional<double> trap_failure;  // exact per-test-round failure rate
    std::optional<bounds::BoundReport> bound;
    std::optional<double> accept_bound;  // omega < p_min
    bool noise_range_known = true;       // false for non-Pauli noise without a given range
    std::string note;                    // why a quantity is absent
};

struct Capture {
    std::string wire_log, client_view, server_view;
};

struct ExperimentReport {
    std::string pattern_ref;
    ProtocolParams params;
    std::string threat;
    bool honest_device = true;  // no scripted deviation: noise-only bounds apply
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::uint64_t expected_output = 0;
    std::uint64_t accept_count = 0;
    std::uint64_t fail_count = 0;  // accepted with a wrong output
    std::map<std::string, std::uint64_t> abort_counts;  // by reason
    std::map<std::uint32_t, std::uint64_t> c_fail_histogram;
    std::map<std::string, std::uint64_t> verdicts;  // "ok:<y>" or "abort:<reason>"
    std::uint64_t test_rounds = 0, failed_test_rounds = 0;
    std::uint64_t redo_count = 0;
    Analytic analytic;
    std::vector<ComparisonRow> comparisons;
    std::optional<Capture> capture;  // trial 0

    /// Honest noiseless device without injected errors, yet an abort or a
    /// wrong accepted output.
    bool anomaly = false;

    std::uint64_t abort_count() const;
    bool violation() const;
};

/// Runs `trials` independent sessions; trial i uses stream Rng(seed).split(i),
/// so the aggregate does not depend on the thread count.
ExperimentReport run_experiment(const ExperimentConfig &config);

/// Server half of a split TCP run: accepts `config.trials` sessions in order
/// on 127.0.0.1:`port`, session i answering with trial i's streams.
/// `ready` receives the bound port once listening.
std::uint64_t serve_experiment(const ExperimentConfig &config, std::uint16_t port,
                               const std::function<void(std::uint16_t)> &ready = {});

/// Rows for every bound that applies to the report's parameters. The
/// rejection and acceptance rows need an honest (noise-only) device.
std::vector<ComparisonRow> compare_bound_vs_empirical(const ExperimentReport &report,
                                                      const bounds::BoundReport &bound);

std::string report_json(const ExperimentReport &report);
std::string report_csv(const ExperimentReport &report);
std::string report_summary(const ExperimentReport &report);
/// Writes the report, CSV and capture files named in `config`.
void write_outputs(const ExperimentReport &report, const ExperimentConfig &config);

}  // namespace vbqc::harness
