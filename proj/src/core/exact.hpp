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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "angle.hpp"
#include "pattern.hpp"
#include "statevector.hpp"
#include "threat.hpp"
#include "ubqc.hpp"

namespace vbqc::exact {

using Rational = boost::multiprecision::cpp_rational;

/// a + b sqrt(2) with rational coefficients. Every Born probability of a
/// pi/4-angle circuit lives here, so equality is exact.
struct QSqrt2 {
    Rational a = 0, b = 0;

    double value() const;
    bool is_zero() const { return a == 0 && b == 0; }
    int sign() const;
    QSqrt2 abs() const { return sign() < 0 ? QSqrt2{-a, -b} : *this; }
    std::string str() const;
    QSqrt2 &operator+=(const QSqrt2 &o) {
        a += o.a;
        b += o.b;
        return *this;
    }
    friend QSqrt2 operator+(QSqrt2 x, const QSqrt2 &y) { return x += y; }
    friend QSqrt2 operator-(const QSqrt2 &x, const QSqrt2 &y) { return {x.a - y.a, x.b - y.b}; }
    friend QSqrt2 operator*(const QSqrt2 &x, const Rational &r) { return {x.a * r, x.b * r}; }
    friend bool operator==(const QSqrt2 &, const QSqrt2 &) = default;
};

/// Element of Z[zeta], zeta = e^{i pi/4}, as coefficients of 1, zeta, zeta^2, zeta^3.
class ZZeta {
public:
    ZZeta() = default;
    ZZeta(std::int64_t integer) { c_[0] = integer; }
    static ZZeta zeta(int k);

    ZZeta operator+(const ZZeta &o) const;
    ZZeta operator-(const ZZeta &o) const;
    ZZeta operator-() const { return ZZeta{} - *this; }
    ZZeta operator*(const ZZeta &o) const;
    ZZeta conj() const;
    /// |z|^2 = a + b sqrt(2), integer a, b.
    std::array<std::int64_t, 2> norm2() const;
    bool is_zero() const { return c_ == std::array<std::int64_t, 4>{}; }
    friend bool operator==(const ZZeta &, const ZZeta &) = default;

private:
    std::array<std::int64_t, 4> c_{};
};

using Matrix = std::array<ZZeta, 4>;  // row-major

Matrix pauli(sv::Pauli p);
/// U P U^dagger with U = basis_map(delta), exact.
Matrix pauli_in_measurement_frame(sv::Pauli p, Angle delta);

/// Unnormalised state over all vertices of a round. |+_theta> is (1, zeta^k),
/// |d> is a basis vector, and a measurement contracts a qubit with the
/// unnormalised bra (1, (-1)^b zeta^{-delta}). The Born probability of a
/// branch is norm2() / 2^(plus_count + measured_count).
class ExactState {
public:
    /// Throws Error(capacity) for more than 16 qubits.
    explicit ExactState(std::span<const sv::PrepSpec> specs);

    void cz(Vertex a, Vertex b);
    void apply(Vertex v, const Matrix &m);
    void project(Vertex v, Angle delta, Bit outcome);

    /// Sum of |amplitude|^2 as a + b sqrt(2).
    std::array<std::int64_t, 2> norm2() const;
    /// Born probability of everything projected so far.
    QSqrt2 probability() const;

private:
    std::size_t qubits_;
    std::vector<ZZeta> amps_;
    std::size_t plus_ = 0, measured_ = 0;
};

inline constexpr std::uint64_t kMaxEnumeration = std::uint64_t{1} << 24;

/// One leaf of the enumeration, keyed by what each party sees.
struct ExactKey {
    std::vector<std::uint8_t> deltas;  // by vertex
    std::vector<Bit> outcomes;         // reported b, by vertex
    std::optional<bool> passed;        // test rounds
    std::optional<std::uint64_t> output;  // computation rounds
    friend auto operator<=>(const ExactKey &, const ExactKey &) = default;
};

struct ExactDistribution {
    std::map<ExactKey, QSqrt2> points;
    std::uint64_t leaves = 0;

    QSqrt2 total() const;
    /// Distribution of the delta messages alone.
    std::map<std::vector<std::uint8_t>, QSqrt2> delta_marginal() const;
    /// Pr[at least one trap fails] (test rounds).
    QSqrt2 fail_probability() const;
    /// Distribution of the decoded output (computation rounds).
    std::map<std::uint64_t, QSqrt2> output_marginal() const;
};

/// Exact total variation distance between two delta marginals.
QSqrt2 tv_distance(const std::map<std::vector<std::uint8_t>, QSqrt2> &x,
                   const std::map<std::vector<std::uint8_t>, QSqrt2> &y);

struct EnumerationRequest {
    const pattern::MeasurementPattern *pattern = nullptr;
    ubqc::RoundKind kind = ubqc::RoundKind::computation;
    std::vector<Bit> input_bits;
    /// Concrete deviation: every directive names its vertex. Unitaries other
    /// than Paulis have no exact form here and raise Error(unsupported_model).
    std::vector<threat::Directive> deviation;
    /// Test rounds: restrict to one trap colour instead of averaging.
    std::optional<std::size_t> trap_colour;
};

/// Space size counted as secret choices times 2^V branch outcomes.
std::uint64_t enumeration_space(const EnumerationRequest &request);

/// Full enumeration over secrets and branch outcomes, weighted by the
/// secret distribution and exact Born probabilities. Throws Error(capacity)
/// past kMaxEnumeration.
ExactDistribution enumerate_exact(const EnumerationRequest &request);

}  // namespace vbqc::exact
