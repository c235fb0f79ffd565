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
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "params.hpp"

namespace vbqc::bounds {

using Rational = boost::multiprecision::cpp_rational;

struct Interval {
    double lo = 0, hi = 0;
};

/// Open interval of admissible omega = w/t: (0, (1/k)(2p-1)/(2p-2)).
/// Throws Error(domain) for p outside [0, 1/2) or k = 0.
Interval threshold_region(std::uint32_t k, double p);

/// Pr[X <= lambda] for X ~ Hypergeometric(N, K, n). Throws Error(input)
/// unless n <= N and K <= N.
Rational hypergeom_exact_cdf_rational(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::int64_t lambda);
double hypergeom_exact_cdf(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::int64_t lambda);
/// Pr[X >= lambda].
double hypergeom_exact_sf(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::int64_t lambda);

/// exp(-2n(K/N - lambda/n)^2), valid for 0 < lambda < nK/N (Error(domain) otherwise).
double hypergeom_lower_tail_bound(std::uint64_t N, std::uint64_t K, std::uint64_t n, double lambda);
/// exp(-2n(lambda/n - K/N)^2), valid for lambda > nK/N.
double hypergeom_upper_tail_bound(std::uint64_t N, std::uint64_t K, std::uint64_t n, double lambda);

/// Pr[X <= k] and Pr[X >= k] for X ~ Binomial(n, p): log-space terms with
/// compensated summation.
double binomial_exact_cdf(std::uint64_t n, double p, std::int64_t k);
double binomial_exact_sf(std::uint64_t n, double p, std::int64_t k);

enum class Side : std::uint8_t { lower, upper };
/// exp(-2(np - k)^2 / n). lower needs k <= np, upper needs k >= np.
double binomial_tail_bound(std::uint64_t n, double p, double k, Side side);

/// exp(-2(omega - p_max)^2 tau n); Error(domain) unless omega > p_max.
double epsilon_rej(double omega, double p_max, double tau, double n);
/// exp(-2(p_min - omega)^2 tau n); Error(domain) unless omega < p_min.
double epsilon_accept_under_excess_noise(double omega, double p_min, double tau, double n);

/// (1/k - eps2)((2p-1)/(2p-2) - phi - eps1) t. Accepts the closed region
/// (boundary values give the limits); Error(domain) outside it.
double w_setting(std::uint32_t k, double p, double phi, double eps1, double eps2, double t);

/// (1 - c + phi - eps3)^{-1} (1/2 - c + phi - eps3) - p with c = (2p-1)/(2p-2).
/// Error(domain) when the first factor's denominator is not positive.
double eps4_from(double p, double phi, double eps3);

/// One point of the verifiability bound: run shape plus free parameters.
struct BoundInputs {
    double n = 0;
    double delta = 0.5;
    double tau = 0.5;
    std::uint32_t k = 1;
    double p = 0;
    double phi = 0, eps1 = 0, eps2 = 0, eps3 = 0;

    double eps4() const { return eps4_from(p, phi, eps3); }
    /// w/t implied by the w-setting formula.
    double omega() const;
    static BoundInputs from(const ProtocolParams &params, double phi, double eps1, double eps2, double eps3);
};

/// Name of the first violated feasibility constraint, if any.
std::optional<std::string> infeasibility(const BoundInputs &in);

/// The four exponents (natural log of each term) of the two branches.
struct VerTerms {
    double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
};
VerTerms ver_terms(const BoundInputs &in);  // Error(domain) if infeasible

/// log of max(A1 + A2, B1 + B2) before clamping; usable far below 1e-308.
double log_epsilon_ver(const BoundInputs &in);
/// max of the two branch sums, clamped to 1.
double epsilon_ver(const BoundInputs &in);

/// 4 sqrt(2 eps_ver) + 2 eps_bl + 2 eps_ind, clamped to 1.
double epsilon_sec(double eps_ver, double eps_bl = 0, double eps_ind = 0);

struct BoundReport {
    BoundInputs assignment;
    double omega = 0;
    double epsilon_ver = 1;
    double log_epsilon_ver = 0;  // unclamped
    double epsilon_rej = 1;      // 1 when omega <= p_max (no guarantee)
    double epsilon_cor = 1;      // min(1, rej + ver)
    double epsilon_sec = 1;
    double eps_bl = 0, eps_ind = 0;
    double p_max = 0;
    double w_implied = 0;
    std::uint64_t evaluations = 0;
};

struct OptimizerOptions {
    std::size_t grid_per_axis = 22;  // 22^3 = 10648 grid points
    std::size_t starts = 5;
    std::size_t iterations = 200;
    double tolerance = 1e-12;
    double phi_min = 0;  // forces phi >= phi_min (shrinks the region)
};

/// Shape of a bound query independent of integer round counts.
struct BoundSpec {
    double n = 0, delta = 0.5, tau = 0.5;
    std::uint32_t k = 1;
    double p = 0;
    double omega = 0;
    double p_max = 0;
    static BoundSpec from(const ProtocolParams &params, std::optional<double> target_omega = std::nullopt);
};

/// Minimises eps_ver over (phi, eps1, eps3) with eps2 fixed by the
/// w-setting equation at `spec.omega`. Throws Error(infeasible) naming the
/// violated constraint when the region is empty.
BoundReport minimize_epsilon_ver(const BoundSpec &spec, const OptimizerOptions &options = {});
BoundReport minimize_epsilon_ver(const ProtocolParams &params, std::optional<double> target_omega = std::nullopt,
                                 const OptimizerOptions &options = {});

/// Fills rej/cor/sec of `report` from its ver and `p_max`.
void compose(BoundReport &report, double tau, double n);

inline constexpr std::uint64_t kTuneCap = std::uint64_t{1} << 40;

struct TuneResult {
    std::uint64_t n = 0, d = 0, t = 0;
    double w_implied = 0;
    BoundReport report;
};

/// Smallest n (delta, tau, omega fixed by `shape`) with eps_sec <= target_sec
/// and eps_cor <= target_cor. Throws Error(infeasible) for an empty region
/// or when no n up to `cap` suffices.
TuneResult tune_n(const ProtocolParams &shape, double target_sec, double target_cor, double p_max,
                  const OptimizerOptions &options = {}, std::uint64_t cap = kTuneCap);

std::string to_json(const BoundReport &report);
std::string csv_header();
std::string csv_row(const BoundReport &report);

}  // namespace vbqc::bounds
