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

#include "bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "json.hpp"

namespace vbqc::bounds {

namespace {

using boost::multiprecision::cpp_int;

constexpr std::uint64_t kRationalLimit = 1024;

cpp_int binom(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    cpp_int r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

double log_binom(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

/// Kahan-Babuska summation.
class Sum {
public:
    void add(double x) {
        const double t = s_ + x;
        c_ += std::abs(s_) >= std::abs(x) ? (s_ - t) + x : (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0, c_ = 0;
};

void check_hypergeom(std::uint64_t N, std::uint64_t K, std::uint64_t n) {
    if (K > N || n > N) {
        fail(ErrorCode::input, "hypergeometric needs K <= N and n <= N (N=" + std::to_string(N) + ", K=" +
                                   std::to_string(K) + ", n=" + std::to_string(n) + ")");
    }
}

std::uint64_t support_lo(std::uint64_t N, std::uint64_t K, std::uint64_t n) { return n > N - K ? n - (N - K) : 0; }
std::uint64_t support_hi(std::uint64_t K, std::uint64_t n) { return std::min(K, n); }

double hypergeom_log_pmf(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::uint64_t x) {
    return log_binom(double(K), double(x)) + log_binom(double(N - K), double(n - x)) - log_binom(double(N), double(n));
}

double lse(double x, double y) {
    const double hi = std::max(x, y), lo = std::min(x, y);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(lo - hi));
}

std::string num(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}

}  // namespace

Interval threshold_region(std::uint32_t k, double p) {
    if (k == 0) fail(ErrorCode::domain, "k must be at least 1");
    if (!(p >= 0 && p < 0.5)) fail(ErrorCode::domain, "threshold region needs 0 <= p < 1/2");
    return {0.0, noise_ceiling(p) / k};
}

Rational hypergeom_exact_cdf_rational(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::int64_t lambda) {
    check_hypergeom(N, K, n);
    const auto lo = support_lo(N, K, n), hi = support_hi(K, n);
    if (lambda < 0 || static_cast<std::uint64_t>(lambda) < lo) return 0;
    const std::uint64_t top = std::min<std::uint64_t>(hi, static_cast<std::uint64_t>(lambda));
    cpp_int num = 0;
    for (std::uint64_t x = lo; x <= top; ++x) num += binom(K, x) * binom(N - K, n - x);
    return Rational(num, binom(N, n));
}

double hypergeom_exact_cdf(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::int64_t lambda) {
    check_hypergeom(N, K, n);
    if (N <= kRationalLimit) return hypergeom_exact_cdf_rational(N, K, n, lambda).convert_to<double>();
    const auto lo = support_lo(N, K, n), hi = support_hi(K, n);
    if (lambda < 0 || static_cast<std::uint64_t>(lambda) < lo) return 0;
    if (static_cast<std::uint64_t>(lambda) >= hi) return 1;
    Sum s;
    for (std::uint64_t x = lo; x <= static_cast<std::uint64_t>(lambda); ++x) s.add(std::exp(hypergeom_log_pmf(N, K, n, x)));
    return std::clamp(s.value(), 0.0, 1.0);
}

double hypergeom_exact_sf(std::uint64_t N, std::uint64_t K, std::uint64_t n, std::int64_t lambda) {
    check_hypergeom(N, K, n);
    if (N <= kRationalLimit) return (1 - hypergeom_exact_cdf_rational(N, K, n, lambda - 1)).convert_to<double>();
    const auto lo = support_lo(N, K, n), hi = support_hi(K, n);
    if (lambda <= static_cast<std::int64_t>(lo)) return 1;
    if (static_cast<std::uint64_t>(lambda) > hi) return 0;
    Sum s;
    for (std::uint64_t x = static_cast<std::uint64_t>(lambda); x <= hi; ++x) s.add(std::exp(hypergeom_log_pmf(N, K, n, x)));
    return std::clamp(s.value(), 0.0, 1.0);
}

double hypergeom_lower_tail_bound(std::uint64_t N, std::uint64_t K, std::uint64_t n, double lambda) {
    check_hypergeom(N, K, n);
    if (N == 0 || n == 0) fail(ErrorCode::domain, "lower tail bound needs N, n > 0");
    const double mean = static_cast<double>(n) * K / N;
    if (!(lambda > 0 && lambda < mean)) {
        fail(ErrorCode::domain, "lower tail bound stated for 0 < lambda < nK/N = " + num(mean));
    }
    const double gap = static_cast<double>(K) / N - lambda / n;
    return std::exp(-2.0 * n * gap * gap);
}

double hypergeom_upper_tail_bound(std::uint64_t N, std::uint64_t K, std::uint64_t n, double lambda) {
    check_hypergeom(N, K, n);
    if (N == 0 || n == 0) fail(ErrorCode::domain, "upper tail bound needs N, n > 0");
    const double mean = static_cast<double>(n) * K / N;
    if (!(lambda > mean)) fail(ErrorCode::domain, "upper tail bound stated for lambda > nK/N = " + num(mean));
    const double gap = lambda / n - static_cast<double>(K) / N;
    return std::exp(-2.0 * n * gap * gap);
}

double binomial_exact_cdf(std::uint64_t n, double p, std::int64_t k) {
    if (!(p >= 0 && p <= 1)) fail(ErrorCode::input, "binomial p outside [0,1]");
    if (k < 0) return 0;
    if (static_cast<std::uint64_t>(k) >= n) return 1;
    if (p == 0) return 1;
    if (p == 1) return 0;
    const double lp = std::log(p), lq = std::log1p(-p);
    Sum s;
    for (std::uint64_t i = 0; i <= static_cast<std::uint64_t>(k); ++i) {
        s.add(std::exp(log_binom(double(n), double(i)) + i * lp + (n - i) * lq));
    }
    return std::clamp(s.value(), 0.0, 1.0);
}

double binomial_exact_sf(std::uint64_t n, double p, std::int64_t k) {
    if (!(p >= 0 && p <= 1)) fail(ErrorCode::input, "binomial p outside [0,1]");
    if (k <= 0) return 1;
    if (static_cast<std::uint64_t>(k) > n) return 0;
    if (p == 0) return 0;
    if (p == 1) return 1;
    const double lp = std::log(p), lq = std::log1p(-p);
    Sum s;
    for (std::uint64_t i = static_cast<std::uint64_t>(k); i <= n; ++i) {
        s.add(std::exp(log_binom(double(n), double(i)) + i * lp + (n - i) * lq));
    }
    return std::clamp(s.value(), 0.0, 1.0);
}

double binomial_tail_bound(std::uint64_t n, double p, double k, Side side) {
    if (n == 0) fail(ErrorCode::domain, "binomial bound needs n > 0");
    if (!(p >= 0 && p <= 1)) fail(ErrorCode::domain, "binomial p outside [0,1]");
    const double mean = n * p;
    if (side == Side::lower && k > mean) fail(ErrorCode::domain, "lower tail bound needs k <= np = " + num(mean));
    if (side == Side::upper && k < mean) fail(ErrorCode::domain, "upper tail bound needs k >= np = " + num(mean));
    const double gap = mean - k;
    return std::exp(-2.0 * gap * gap / n);
}

double epsilon_rej(double omega, double p_max, double tau, double n) {
    if (!(omega > p_max)) fail(ErrorCode::domain, "epsilon_rej needs omega > p_max");
    const double g = omega - p_max;
    return std::exp(-2.0 * g * g * tau * n);
}

double epsilon_accept_under_excess_noise(double omega, double p_min, double tau, double n) {
    if (!(omega < p_min)) fail(ErrorCode::domain, "acceptance bound needs omega < p_min");
    const double g = p_min - omega;
    return std::exp(-2.0 * g * g * tau * n);
}

double w_setting(std::uint32_t k, double p, double phi, double eps1, double eps2, double t) {
    if (k == 0) fail(ErrorCode::domain, "k must be at least 1");
    if (!(p >= 0 && p < 0.5)) fail(ErrorCode::domain, "p must lie in [0, 1/2)");
    const double c = noise_ceiling(p);
    if (!(phi >= 0 && phi < c)) fail(ErrorCode::domain, "need 0 <= phi < (2p-1)/(2p-2)");
    if (!(eps1 >= 0 && eps1 <= 0.5 - phi)) fail(ErrorCode::domain, "need 0 <= eps1 <= 1/2 - phi");
    if (!(eps2 >= 0 && eps2 <= 1.0 / k)) fail(ErrorCode::domain, "need 0 <= eps2 <= 1/k");
    if (!(t >= 0)) fail(ErrorCode::domain, "t must be non-negative");
    return (1.0 / k - eps2) * (c - phi - eps1) * t;
}

double eps4_from(double p, double phi, double eps3) {
    const double c = noise_ceiling(p);
    const double den = 1 - c + phi - eps3;
    if (!(den > 0)) fail(ErrorCode::domain, "eps4: 1 - c + phi - eps3 must be positive");
    return (0.5 - c + phi - eps3) / den - p;
}

double BoundInputs::omega() const { return (1.0 / k - eps2) * (noise_ceiling(p) - phi - eps1); }

BoundInputs BoundInputs::from(const ProtocolParams &params, double phi, double eps1, double eps2, double eps3) {
    return {static_cast<double>(params.n()), params.delta(), params.tau(), params.k, params.p, phi, eps1, eps2, eps3};
}

std::optional<std::string> infeasibility(const BoundInputs &in) {
    if (in.k == 0) return "k >= 1";
    if (!(in.p >= 0 && in.p < 0.5)) return "0 <= p < 1/2";
    if (!(in.n >= 0)) return "n >= 0";
    if (!(in.delta >= 0 && in.delta <= 1)) return "0 <= delta <= 1";
    if (!(in.tau >= 0 && in.tau <= 1)) return "0 <= tau <= 1";
    const double c = noise_ceiling(in.p);
    if (!(in.phi > 0 && in.phi < c)) return "0 < phi < (2p-1)/(2p-2)";
    if (!(in.eps1 > 0 && in.eps1 < 0.5 - in.phi)) return "0 < eps1 < 1/2 - phi";
    if (!(in.eps2 > 0 && in.eps2 < 1.0 / in.k)) return "0 < eps2 < 1/k";
    if (!(in.eps3 > 0 && in.eps3 < in.phi)) return "0 < eps3 < phi";
    if (!(eps4_from(in.p, in.phi, in.eps3) > 0)) return "eps4 > 0";
    return std::nullopt;
}

namespace {

VerTerms raw_terms(const BoundInputs &in) {
    const double c = noise_ceiling(in.p);
    const double e4 = (0.5 - c + in.phi - in.eps3) / (1 - c + in.phi - in.eps3) - in.p;
    VerTerms t;
    t.a1 = -2 * (1 - c + in.phi - in.eps3) * in.delta * e4 * e4 * in.n;
    t.a2 = -2 * in.delta * in.delta * in.eps3 * in.eps3 * in.n / (c - in.phi);
    t.b1 = -2 * in.tau * in.tau * in.eps1 * in.eps1 * in.n / (c - in.phi);
    t.b2 = -2 * (c - in.phi - in.eps1) * in.tau * in.eps2 * in.eps2 * in.n;
    return t;
}

double log_ver_of(const VerTerms &t) { return std::max(lse(t.a1, t.a2), lse(t.b1, t.b2)); }

}  // namespace

VerTerms ver_terms(const BoundInputs &in) {
    if (auto why = infeasibility(in)) fail(ErrorCode::domain, "infeasible bound inputs: violates " + *why);
    return raw_terms(in);
}

double log_epsilon_ver(const BoundInputs &in) { return log_ver_of(ver_terms(in)); }

double epsilon_ver(const BoundInputs &in) { return std::min(1.0, std::exp(log_epsilon_ver(in))); }

double epsilon_sec(double eps_ver, double eps_bl, double eps_ind) {
    for (double x : {eps_ver, eps_bl, eps_ind}) {
        if (!(x >= 0 && x <= 1)) fail(ErrorCode::domain, "epsilon_sec inputs must lie in [0,1]");
    }
    return std::min(1.0, 4 * std::sqrt(2 * eps_ver) + 2 * eps_bl + 2 * eps_ind);
}

BoundSpec BoundSpec::from(const ProtocolParams &params, std::optional<double> target_omega) {
    return {static_cast<double>(params.n()), params.delta(), params.tau(), params.k, params.p,
            target_omega.value_or(params.omega()), params.p_max};
}

void compose(BoundReport &r, double tau, double n) {
    r.epsilon_rej = r.omega > r.p_max ? epsilon_rej(r.omega, r.p_max, tau, n) : 1.0;
    r.epsilon_cor = std::min(1.0, r.epsilon_rej + r.epsilon_ver);
    r.epsilon_sec = epsilon_sec(r.epsilon_ver, r.eps_bl, r.eps_ind);
}

namespace {

/// (phi, eps1, eps3) from unit-cube coordinates; eps2 from the w-setting
/// equation at the target omega.
struct Region {
    BoundSpec spec;
    double c, phi_min, span;

    BoundInputs at(const std::array<double, 3> &u) const {
        BoundInputs in{spec.n, spec.delta, spec.tau, spec.k, spec.p, 0, 0, 0, 0};
        in.phi = phi_min + u[0] * span;
        const double room = c - spec.k * spec.omega - in.phi;
        in.eps1 = u[1] * room;
        in.eps3 = u[2] * in.phi;
        in.eps2 = 1.0 / spec.k - spec.omega / (c - in.phi - in.eps1);
        return in;
    }
    double objective(const std::array<double, 3> &u) const {
        const double v = log_ver_of(raw_terms(at(u)));
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }
};

double sigmoid(double x) { return 1 / (1 + std::exp(-x)); }
double logit(double u) { return std::log(u / (1 - u)); }

std::array<double, 3> to_unit(const std::array<double, 3> &x) { return {sigmoid(x[0]), sigmoid(x[1]), sigmoid(x[2])}; }

struct Point {
    std::array<double, 3> x;
    double f;
};

/// Nelder-Mead in logit coordinates; never returns worse than its start.
Point nelder_mead(const Region &region, std::array<double, 3> start, const OptimizerOptions &opt,
                  std::uint64_t &evals) {
    auto f = [&](const std::array<double, 3> &x) {
        ++evals;
        return region.objective(to_unit(x));
    };
    std::array<Point, 4> s;
    s[0] = {start, f(start)};
    for (int i = 0; i < 3; ++i) {
        auto x = start;
        x[i] += 0.5;
        s[i + 1] = {x, f(x)};
    }
    auto lerp = [](const std::array<double, 3> &a, const std::array<double, 3> &b, double t) {
        return std::array<double, 3>{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
    };
    for (std::size_t it = 0; it < opt.iterations; ++it) {
        std::sort(s.begin(), s.end(), [](const Point &a, const Point &b) { return a.f < b.f; });
        if (std::abs(s[3].f - s[0].f) < opt.tolerance) break;
        std::array<double, 3> centroid{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) centroid[j] += s[i].x[j] / 3;
        }
        const auto xr = lerp(centroid, s[3].x, -1.0);
        const double fr = f(xr);
        if (fr < s[0].f) {
            const auto xe = lerp(centroid, s[3].x, -2.0);
            const double fe = f(xe);
            s[3] = fe < fr ? Point{xe, fe} : Point{xr, fr};
        } else if (fr < s[2].f) {
            s[3] = {xr, fr};
        } else {
            const bool outside = fr < s[3].f;
            const auto xc = lerp(centroid, outside ? xr : s[3].x, 0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, s[3].f)) {
                s[3] = {xc, fc};
            } else {
                for (int i = 1; i < 4; ++i) {
                    s[i].x = lerp(s[0].x, s[i].x, 0.5);
                    s[i].f = f(s[i].x);
                }
            }
        }
    }
    return *std::min_element(s.begin(), s.end(), [](const Point &a, const Point &b) { return a.f < b.f; });
}

}  // namespace

BoundReport minimize_epsilon_ver(const BoundSpec &spec, const OptimizerOptions &opt) {
    if (spec.k == 0) fail(ErrorCode::infeasible, "k >= 1 required");
    if (!(spec.p >= 0 && spec.p < 0.5)) fail(ErrorCode::infeasible, "0 <= p < 1/2 required");
    const double c = noise_ceiling(spec.p);
    const double ceiling = c / spec.k;
    if (!(spec.omega > 0)) fail(ErrorCode::infeasible, "omega > 0 violated (omega = " + num(spec.omega) + ")");
    if (!(spec.omega < ceiling)) {
        fail(ErrorCode::infeasible, "omega < (1/k)(2p-1)/(2p-2) = " + num(ceiling) + " violated (omega = " +
                                        num(spec.omega) + ")");
    }
    const double span = c - spec.k * spec.omega - opt.phi_min;
    if (!(opt.phi_min >= 0 && span > 0)) {
        fail(ErrorCode::infeasible, "phi >= " + num(opt.phi_min) + " leaves no room for eps1 > 0 and eps2 > 0");
    }
    const Region region{spec, c, opt.phi_min, span};
    const std::size_t g = std::max<std::size_t>(opt.grid_per_axis, 1);

    BoundReport report;
    std::vector<Point> grid;
    grid.reserve(g * g * g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
            for (std::size_t l = 0; l < g; ++l) {
                const std::array<double, 3> u{(i + 0.5) / g, (j + 0.5) / g, (l + 0.5) / g};
                grid.push_back({u, region.objective(u)});
            }
        }
    }
    report.evaluations = grid.size();
    const std::size_t starts = std::min(opt.starts, grid.size());
    std::partial_sort(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(starts), grid.end(),
                      [](const Point &a, const Point &b) { return a.f < b.f; });
    Point best = grid.front();
    for (std::size_t s = 0; s < starts; ++s) {
        const auto &u = grid[s].x;
        Point p = nelder_mead(region, {logit(u[0]), logit(u[1]), logit(u[2])}, opt, report.evaluations);
        p.x = to_unit(p.x);
        if (p.f < best.f) best = p;
    }
    report.assignment = region.at(best.x);
    report.omega = spec.omega;
    report.log_epsilon_ver = best.f;
    report.epsilon_ver = std::min(1.0, std::exp(best.f));
    report.p_max = spec.p_max;
    const auto &a = report.assignment;
    report.w_implied = (1.0 / a.k - a.eps2) * (c - a.phi - a.eps1) * spec.tau * spec.n;
    compose(report, spec.tau, spec.n);
    return report;
}

BoundReport minimize_epsilon_ver(const ProtocolParams &params, std::optional<double> target_omega,
                                 const OptimizerOptions &options) {
    params.validate();
    return minimize_epsilon_ver(BoundSpec::from(params, target_omega), options);
}

TuneResult tune_n(const ProtocolParams &shape, double target_sec, double target_cor, double p_max,
                  const OptimizerOptions &options, std::uint64_t cap) {
    shape.validate();
    const double delta = shape.delta(), tau = shape.tau(), omega = shape.omega();
    if (!(p_max < omega)) fail(ErrorCode::infeasible, "p_max < omega violated");
    const double ceiling = threshold_region(shape.k, shape.p).hi;
    if (!(omega < ceiling)) fail(ErrorCode::infeasible, "omega < (1/k)(2p-1)/(2p-2) = " + num(ceiling) + " violated");

    auto split = [&](std::uint64_t n) {
        const auto d = static_cast<std::uint64_t>(std::llround(delta * static_cast<double>(n)));
        return std::pair{d, n - std::min(d, n)};
    };
    auto evaluate = [&](std::uint64_t n) {
        BoundSpec spec{static_cast<double>(n), delta, tau, shape.k, shape.p, omega, p_max};
        return minimize_epsilon_ver(spec, options);
    };
    auto good = [&](const BoundReport &r) { return r.epsilon_sec <= target_sec && r.epsilon_cor <= target_cor; };

    std::uint64_t n_min = 2;
    while (split(n_min).first < 1 || split(n_min).second < 1) ++n_min;
    auto finish = [&](std::uint64_t n, BoundReport r) {
        TuneResult out;
        out.n = n;
        std::tie(out.d, out.t) = split(n);
        out.w_implied = omega * static_cast<double>(out.t);
        out.report = std::move(r);
        return out;
    };

    BoundReport r = evaluate(n_min);
    if (good(r)) return finish(n_min, r);
    std::uint64_t lo = n_min, hi = n_min;
    for (;;) {
        if (hi >= cap) {
            fail(ErrorCode::infeasible, "targets not reached for any n <= " + std::to_string(cap) +
                                            " (eps_sec=" + num(r.epsilon_sec) + ", eps_cor=" + num(r.epsilon_cor) + ")");
        }
        lo = hi;
        hi = std::min(cap, hi * 2);
        r = evaluate(hi);
        if (good(r)) break;
    }
    BoundReport best = r;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        BoundReport m = evaluate(mid);
        if (good(m)) {
            hi = mid;
            best = std::move(m);
        } else {
            lo = mid;
        }
    }
    return finish(hi, best);
}

std::string to_json(const BoundReport &r) {
    using nlohmann::json;
    const auto &a = r.assignment;
    json j = {{"n", a.n},
              {"delta", a.delta},
              {"tau", a.tau},
              {"k", a.k},
              {"p", a.p},
              {"omega", r.omega},
              {"p_max", r.p_max},
              {"assignment",
               {{"phi", a.phi}, {"eps1", a.eps1}, {"eps2", a.eps2}, {"eps3", a.eps3}, {"eps4", eps4_from(a.p, a.phi, a.eps3)}}},
              {"epsilon_ver", r.epsilon_ver},
              {"log_epsilon_ver", r.log_epsilon_ver},
              {"epsilon_rej", r.epsilon_rej},
              {"epsilon_cor", r.epsilon_cor},
              {"epsilon_sec", r.epsilon_sec},
              {"eps_bl", r.eps_bl},
              {"eps_ind", r.eps_ind},
              {"w_implied", r.w_implied},
              {"clamped_to_one", r.log_epsilon_ver >= 0},
              {"evaluations", r.evaluations}};
    return j.dump(2);
}

std::string csv_header() { return "n,delta,tau,omega,phi,eps1,eps2,eps3,eps4,eps_ver,eps_rej,eps_cor,eps_sec"; }

std::string csv_row(const BoundReport &r) {
    const auto &a = r.assignment;
    std::ostringstream out;
    out.precision(10);
    out << a.n << ',' << a.delta << ',' << a.tau << ',' << r.omega << ',' << a.phi << ',' << a.eps1 << ',' << a.eps2
        << ',' << a.eps3 << ',' << eps4_from(a.p, a.phi, a.eps3) << ',' << r.epsilon_ver << ',' << r.epsilon_rej << ','
        << r.epsilon_cor << ',' << r.epsilon_sec;
    return out.str();
}

}  // namespace vbqc::bounds
