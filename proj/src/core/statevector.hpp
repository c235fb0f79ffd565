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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "angle.hpp"
#include "rng.hpp"

namespace vbqc::sv {

inline constexpr std::size_t kDefaultMaxQubits = 20;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kClampTolerance = 1e-12;

using Complex = std::complex<double>;
/// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Matrix2 = std::array<Complex, 4>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);  // throws Error(input)
Matrix2 pauli_matrix(Pauli p);
/// Basis change taking |0>,|1> to |+_a>,|-_a>: U = diag(1, e^{ia}) H.
Matrix2 basis_map(double angle);
Matrix2 multiply(const Matrix2 &a, const Matrix2 &b);
Matrix2 adjoint(const Matrix2 &m);
/// U P U^dagger with U = basis_map(angle).
Matrix2 conjugate_into_basis(Pauli p, double angle);
bool is_unitary(const Matrix2 &m, double tolerance = kNormTolerance);

/// What the client sends for one vertex: |+_theta> or the dummy |d>.
struct PrepSpec {
    enum class Kind : std::uint8_t { plus_theta = 0, dummy = 1 };
    Kind kind = Kind::plus_theta;
    std::uint8_t value = 0;  // k for plus_theta, d for dummy

    static PrepSpec plus(Angle theta) { return {Kind::plus_theta, theta.k()}; }
    static PrepSpec dummy(Bit d) { return {Kind::dummy, d}; }

    /// Single-qubit amplitudes (a0, a1) of the described state.
    std::array<Complex, 2> amplitudes() const;
    friend bool operator==(const PrepSpec &, const PrepSpec &) = default;
};

/// Dense pure state over the live qubits of one round. Register position i
/// is bit i of the amplitude index; `labels()[i]` is its protocol vertex.
class PureState {
public:
    explicit PureState(std::size_t max_qubits = kDefaultMaxQubits);

    /// Product state of the specs, vertex i taking `specs[i]`.
    static PureState prepare(std::span<const PrepSpec> specs, std::size_t max_qubits = kDefaultMaxQubits);

    /// Tensors a fresh qubit onto the register. Throws Error(capacity) past
    /// the cap and Error(input) if `vertex` is already live.
    void add_qubit(Vertex vertex, const std::array<Complex, 2> &amplitudes);

    void apply_cz(Vertex a, Vertex b);
    void apply_pauli(Vertex v, Pauli p);
    void apply_unitary(Vertex v, const Matrix2 &u);

    /// Probability of the |+_angle> outcome on `v`, clamped near 0 and 1.
    double probability_plus(Vertex v, double angle) const;
    /// Destructive measurement in {|+_delta>, |-_delta>}; outcome 0 is |+_delta>.
    Bit measure_angle(Vertex v, Angle delta, Rng &rng);
    Bit measure_radians(Vertex v, double angle, Rng &rng);
    /// Projects onto a chosen outcome without sampling; returns its probability.
    double project(Vertex v, double angle, Bit outcome);

    std::size_t qubit_count() const { return labels_.size(); }
    bool is_live(Vertex v) const;
    std::span<const Vertex> labels() const { return labels_; }
    std::span<const Complex> amplitudes() const { return amps_; }
    double norm() const;

    /// One "index re im" line per amplitude, for fixtures.
    void dump(std::ostream &out) const;

private:
    std::size_t position_of(Vertex v) const;

    std::size_t max_qubits_;
    std::vector<Complex> amps_;
    std::vector<Vertex> labels_;
};

}  // namespace vbqc::sv
