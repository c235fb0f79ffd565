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

#include "ubqc.hpp"

#include "error.hpp"

namespace vbqc::ubqc {

const char *round_kind_name(RoundKind kind) { return kind == RoundKind::test ? "test" : "computation"; }

sv::PrepSpec RoundSecrets::prep_spec(Vertex v) const {
    if (is_dummy(v)) return sv::PrepSpec::dummy(*dummies[v]);
    return sv::PrepSpec::plus(*thetas.at(v));
}

void RoundSecrets::validate(const pattern::MeasurementPattern &pattern) const {
    const std::size_t n = pattern.vertex_count();
    if (thetas.size() != n || rs.size() != n || dummies.size() != n) {
        fail(ErrorCode::input, "round secrets do not cover every vertex");
    }
    if (kind == RoundKind::computation) {
        if (trap_color) fail(ErrorCode::input, "computation round with a trap colour");
        if (input_bits.size() != pattern.inputs.size()) fail(ErrorCode::input, "wrong number of input bits");
        for (Vertex v = 0; v < n; ++v) {
            if (!thetas[v] || !rs[v] || dummies[v]) fail(ErrorCode::input, "computation round roles are inconsistent");
        }
        return;
    }
    if (!trap_color || *trap_color >= pattern.colour_count()) fail(ErrorCode::input, "test round without a valid colour");
    const auto owner = pattern.coloring.class_of(n);
    for (Vertex v = 0; v < n; ++v) {
        const bool trap = owner[v] == *trap_color;
        if (trap != (thetas[v].has_value() && rs[v].has_value()) || trap == dummies[v].has_value()) {
            fail(ErrorCode::input, "test round roles are inconsistent at vertex " + std::to_string(v));
        }
    }
}

RoundSecrets sample_secrets(RoundKind kind, const pattern::MeasurementPattern &pattern,
                            std::span<const Bit> input_bits, Rng &rng) {
    const std::size_t n = pattern.vertex_count();
    RoundSecrets s;
    s.kind = kind;
    s.thetas.assign(n, std::nullopt);
    s.rs.assign(n, std::nullopt);
    s.dummies.assign(n, std::nullopt);
    if (kind == RoundKind::computation) {
        if (input_bits.size() != pattern.inputs.size()) {
            fail(ErrorCode::input, "expected " + std::to_string(pattern.inputs.size()) + " input bits, got " +
                                       std::to_string(input_bits.size()));
        }
        s.input_bits.assign(input_bits.begin(), input_bits.end());
        for (Vertex v = 0; v < n; ++v) {
            s.thetas[v] = rng.angle();
            s.rs[v] = rng.bit();
        }
        return s;
    }
    s.trap_color = static_cast<std::size_t>(rng.below(pattern.colour_count()));
    const auto owner = pattern.coloring.class_of(n);
    for (Vertex v = 0; v < n; ++v) {
        if (owner[v] == *s.trap_color) {
            s.thetas[v] = rng.angle();
            s.rs[v] = rng.bit();
        } else {
            s.dummies[v] = rng.bit();
        }
    }
    return s;
}

namespace {

Bit parity_over(std::span<const Vertex> deps, Decoded decoded, Vertex v) {
    Bit s = 0;
    for (Vertex u : deps) {
        if (u >= decoded.size() || !decoded[u]) {
            fail(ErrorCode::protocol_order, "vertex " + std::to_string(v) + " depends on unmeasured vertex " +
                                                std::to_string(u));
        }
        s ^= *decoded[u];
    }
    return s;
}

}  // namespace

Angle corrected_phi(Vertex v, const pattern::MeasurementPattern &pattern, Decoded decoded) {
    const Bit sx = parity_over(pattern.deps.x_deps.at(v), decoded, v);
    const Bit sz = parity_over(pattern.deps.z_deps.at(v), decoded, v);
    return pattern.angles.at(v).negate_if(sx).plus_pi_if(sz);
}

Angle delta_computation(Vertex v, const RoundSecrets &secrets, const pattern::MeasurementPattern &pattern,
                        Decoded decoded) {
    if (secrets.is_dummy(v)) fail(ErrorCode::input, "delta_computation on dummy vertex " + std::to_string(v));
    Angle theta = *secrets.thetas.at(v);
    if (auto idx = pattern.input_index(v)) theta = theta.plus_pi_if(secrets.input_bits.at(*idx));
    return corrected_phi(v, pattern, decoded) + theta.plus_pi_if(*secrets.rs.at(v));
}

Angle delta_test(Vertex v, const RoundSecrets &secrets, Rng &rng) {
    if (secrets.kind != RoundKind::test) fail(ErrorCode::input, "delta_test outside a test round");
    if (secrets.is_dummy(v)) return rng.angle();
    return secrets.thetas.at(v)->plus_pi_if(*secrets.rs.at(v));
}

Bit decode_outcome(Vertex v, Bit b, const RoundSecrets &secrets) {
    if (!secrets.rs.at(v)) fail(ErrorCode::input, "vertex " + std::to_string(v) + " has no outcome pad (dummy)");
    return b ^ *secrets.rs[v];
}

Bit trap_expected(Vertex v, const RoundSecrets &secrets, const pattern::Graph &graph) {
    if (!secrets.is_trap(v)) fail(ErrorCode::input, "vertex " + std::to_string(v) + " is not a trap");
    Bit expected = *secrets.rs[v];
    for (Vertex u : graph.neighbours(v)) {
        if (secrets.is_dummy(u)) expected ^= *secrets.dummies[u];
    }
    return expected;
}

std::uint64_t pack_output(const pattern::MeasurementPattern &pattern, Decoded decoded) {
    std::uint64_t y = 0;
    for (std::size_t i = 0; i < pattern.outputs.size(); ++i) {
        const Vertex o = pattern.outputs[i];
        if (o >= decoded.size() || !decoded[o]) {
            fail(ErrorCode::protocol_order, "output vertex " + std::to_string(o) + " not measured");
        }
        y |= static_cast<std::uint64_t>(*decoded[o]) << i;
    }
    return y;
}

}  // namespace vbqc::ubqc
