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
#include <span>
#include <vector>

#include "angle.hpp"
#include "pattern.hpp"
#include "rng.hpp"
#include "statevector.hpp"

namespace vbqc::ubqc {

enum class RoundKind : std::uint8_t { computation = 0, test = 1 };

const char *round_kind_name(RoundKind kind);

/// Client-side one-time pads for one round attempt.
///
/// Computation rounds: every vertex has theta and r; no dummies.
/// Test rounds: vertices of the chosen colour are traps (theta, r), every
/// other vertex is a dummy with bit d and no theta/r.
struct RoundSecrets {
    RoundKind kind = RoundKind::computation;
    std::vector<std::optional<Angle>> thetas;
    std::vector<std::optional<Bit>> rs;
    std::vector<std::optional<Bit>> dummies;
    std::optional<std::size_t> trap_color;
    std::vector<Bit> input_bits;

    bool is_trap(Vertex v) const { return kind == RoundKind::test && thetas.at(v).has_value(); }
    bool is_dummy(Vertex v) const { return dummies.at(v).has_value(); }
    sv::PrepSpec prep_spec(Vertex v) const;
    /// Throws Error(input) if the role invariants do not hold for `pattern`.
    void validate(const pattern::MeasurementPattern &pattern) const;
};

RoundSecrets sample_secrets(RoundKind kind, const pattern::MeasurementPattern &pattern,
                            std::span<const Bit> input_bits, Rng &rng);

/// Decoded outcomes s_v seen so far, indexed by vertex.
using Decoded = std::span<const std::optional<Bit>>;

/// phi'_v = (-1)^{s_X} phi_v + s_Z pi. Throws Error(protocol_order) when a
/// dependency has not been measured yet.
Angle corrected_phi(Vertex v, const pattern::MeasurementPattern &pattern, Decoded decoded);

/// delta_v = phi'_v + theta_v + r_v pi, with theta_v + x_v pi for inputs.
Angle delta_computation(Vertex v, const RoundSecrets &secrets, const pattern::MeasurementPattern &pattern,
                        Decoded decoded);

/// Trap: theta_v + r_v pi. Dummy: a fresh uniform angle from `rng`.
Angle delta_test(Vertex v, const RoundSecrets &secrets, Rng &rng);

/// s = b xor r_v. Throws Error(input) for a vertex without an r (a dummy).
Bit decode_outcome(Vertex v, Bit b, const RoundSecrets &secrets);

/// r_v xor (xor of the neighbouring dummies' d). Throws Error(input) for a
/// vertex that is not a trap.
Bit trap_expected(Vertex v, const RoundSecrets &secrets, const pattern::Graph &graph);

/// Output bits s_o packed LSB-first in the order of `pattern.outputs`.
std::uint64_t pack_output(const pattern::MeasurementPattern &pattern, Decoded decoded);

}  // namespace vbqc::ubqc
