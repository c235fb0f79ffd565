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

#include "statevector.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "error.hpp"

namespace vbqc::sv {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': case 'i': return Pauli::I;
        case 'X': case 'x': return Pauli::X;
        case 'Y': case 'y': return Pauli::Y;
        case 'Z': case 'z': return Pauli::Z;
    }
    fail(ErrorCode::input, std::string("unknown Pauli '") + c + "'");
}

Matrix2 pauli_matrix(Pauli p) {
    const Complex i(0, 1);
    switch (p) {
        case Pauli::I: return {1, 0, 0, 1};
        case Pauli::X: return {0, 1, 1, 0};
        case Pauli::Y: return {0, -i, i, 0};
        case Pauli::Z: return {1, 0, 0, -1};
    }
    return {1, 0, 0, 1};
}

Matrix2 basis_map(double angle) {
    const Complex e = std::polar(1.0, angle);
    return {kInvSqrt2, kInvSqrt2, e * kInvSqrt2, -e * kInvSqrt2};
}

Matrix2 multiply(const Matrix2 &a, const Matrix2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Matrix2 adjoint(const Matrix2 &m) { return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}; }

Matrix2 conjugate_into_basis(Pauli p, double angle) {
    const Matrix2 u = basis_map(angle);
    return multiply(multiply(u, pauli_matrix(p)), adjoint(u));
}

bool is_unitary(const Matrix2 &m, double tolerance) {
    const Matrix2 g = multiply(adjoint(m), m);
    return std::abs(g[0] - 1.0) < tolerance && std::abs(g[1]) < tolerance && std::abs(g[2]) < tolerance &&
           std::abs(g[3] - 1.0) < tolerance;
}

std::array<Complex, 2> PrepSpec::amplitudes() const {
    if (kind == Kind::dummy) {
        return value ? std::array<Complex, 2>{0.0, 1.0} : std::array<Complex, 2>{1.0, 0.0};
    }
    return {kInvSqrt2, std::polar(kInvSqrt2, Angle(value).radians())};
}

PureState::PureState(std::size_t max_qubits) : max_qubits_(max_qubits), amps_{1.0} {}

PureState PureState::prepare(std::span<const PrepSpec> specs, std::size_t max_qubits) {
    if (specs.empty()) fail(ErrorCode::input, "prepare needs at least one qubit");
    if (specs.size() > max_qubits) {
        fail(ErrorCode::capacity, "prepare: " + std::to_string(specs.size()) + " qubits exceeds cap " +
                                      std::to_string(max_qubits));
    }
    PureState s(max_qubits);
    for (std::size_t v = 0; v < specs.size(); ++v) s.add_qubit(static_cast<Vertex>(v), specs[v].amplitudes());
    return s;
}

void PureState::add_qubit(Vertex vertex, const std::array<Complex, 2> &a) {
    if (is_live(vertex)) fail(ErrorCode::input, "vertex " + std::to_string(vertex) + " is already live");
    if (labels_.size() >= max_qubits_) {
        fail(ErrorCode::capacity, "register full (" + std::to_string(max_qubits_) + " qubits)");
    }
    const std::size_t half = amps_.size();
    amps_.resize(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
        amps_[half + i] = amps_[i] * a[1];
        amps_[i] *= a[0];
    }
    labels_.push_back(vertex);
}

bool PureState::is_live(Vertex v) const { return std::find(labels_.begin(), labels_.end(), v) != labels_.end(); }

std::size_t PureState::position_of(Vertex v) const {
    auto it = std::find(labels_.begin(), labels_.end(), v);
    if (it == labels_.end()) fail(ErrorCode::input, "vertex " + std::to_string(v) + " is not live");
    return static_cast<std::size_t>(it - labels_.begin());
}

void PureState::apply_cz(Vertex a, Vertex b) {
    if (a == b) fail(ErrorCode::input, "CZ needs two distinct vertices");
    const std::size_t mask = (std::size_t{1} << position_of(a)) | (std::size_t{1} << position_of(b));
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == mask) amps_[i] = -amps_[i];
    }
}

void PureState::apply_pauli(Vertex v, Pauli p) {
    const std::size_t bit = std::size_t{1} << position_of(v);
    if (p == Pauli::I) return;
    if (p == Pauli::Z) {
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) amps_[i] = -amps_[i];
        }
        return;
    }
    const Complex i_unit(0, 1);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        Complex a0 = amps_[i], a1 = amps_[i | bit];
        if (p == Pauli::X) {
            amps_[i] = a1;
            amps_[i | bit] = a0;
        } else {  // Y = [[0,-i],[i,0]]
            amps_[i] = -i_unit * a1;
            amps_[i | bit] = i_unit * a0;
        }
    }
}

void PureState::apply_unitary(Vertex v, const Matrix2 &u) {
    const std::size_t bit = std::size_t{1} << position_of(v);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        Complex a0 = amps_[i], a1 = amps_[i | bit];
        amps_[i] = u[0] * a0 + u[1] * a1;
        amps_[i | bit] = u[2] * a0 + u[3] * a1;
    }
}

double PureState::probability_plus(Vertex v, double angle) const {
    const std::size_t bit = std::size_t{1} << position_of(v);
    const Complex phase = std::polar(1.0, -angle);
    double p = 0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        p += std::norm(amps_[i] + phase * amps_[i | bit]);
    }
    p *= 0.5;
    if (p < kClampTolerance) p = 0;
    if (p > 1 - kClampTolerance) p = 1;
    return p;
}

double PureState::project(Vertex v, double angle, Bit outcome) {
    const std::size_t pos = position_of(v);
    const std::size_t bit = std::size_t{1} << pos;
    const Complex phase = std::polar(1.0, -angle) * (outcome ? -1.0 : 1.0);
    std::vector<Complex> next(amps_.size() / 2);
    double p = 0;
    for (std::size_t i = 0, j = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        // Remove bit `pos` from the index: low bits stay, high bits shift down.
        j = (i & (bit - 1)) | ((i >> 1) & ~(bit - 1));
        next[j] = (amps_[i] + phase * amps_[i | bit]) * kInvSqrt2;
        p += std::norm(next[j]);
    }
    if (p > 0) {
        const double scale = 1.0 / std::sqrt(p);
        for (auto &a : next) a *= scale;
    }
    amps_ = std::move(next);
    labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(pos));
    return p;
}

Bit PureState::measure_radians(Vertex v, double angle, Rng &rng) {
    const double p0 = probability_plus(v, angle);
    const Bit outcome = rng.uniform() < p0 ? 0 : 1;
    project(v, angle, outcome);
    return outcome;
}

Bit PureState::measure_angle(Vertex v, Angle delta, Rng &rng) { return measure_radians(v, delta.radians(), rng); }

double PureState::norm() const {
    double s = 0;
    for (const auto &a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

void PureState::dump(std::ostream &out) const {
    out << "# qubits";
    for (Vertex v : labels_) out << ' ' << v;
    out << '\n';
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        out << i << ' ' << amps_[i].real() << ' ' << amps_[i].imag() << '\n';
    }
}

}  // namespace vbqc::sv
