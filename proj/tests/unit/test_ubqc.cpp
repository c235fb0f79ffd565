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

#include <array>
#include <optional>
#include <vector>

#include "doctest.h"
#include "pattern.hpp"
#include "support.hpp"
#include "ubqc.hpp"

using namespace vbqc;
using namespace vbqc::ubqc;
using vbqc::test::error_of;
using vbqc::test::within_sigma;

namespace {

pattern::MeasurementPattern line_with_phi2(int k) {
    auto p = pattern::three_qubit_line();
    p.angles[2] = Angle(k);
    return p;
}

RoundSecrets computation_secrets(std::size_t n, std::vector<Bit> inputs = {}) {
    RoundSecrets s;
    s.kind = RoundKind::computation;
    s.thetas.assign(n, Angle(0));
    s.rs.assign(n, Bit{0});
    s.dummies.assign(n, std::nullopt);
    s.input_bits = std::move(inputs);
    return s;
}

}  // namespace

TEST_CASE("sample_secrets shapes") {
    Rng rng(3);
    const auto wire = pattern::two_qubit_wire();
    const std::vector<Bit> x{0};
    const auto c = sample_secrets(RoundKind::computation, wire, x, rng);
    for (Vertex v = 0; v < 2; ++v) {
        CHECK(c.thetas[v].has_value());
        CHECK(c.rs[v].has_value());
        CHECK_FALSE(c.dummies[v].has_value());
    }
    CHECK_FALSE(c.trap_color.has_value());
    c.validate(wire);

    bool saw_zero = false;
    for (int i = 0; i < 64 && !saw_zero; ++i) {
        const auto t = sample_secrets(RoundKind::test, wire, {}, rng);
        t.validate(wire);
        if (*t.trap_color != 0) continue;
        saw_zero = true;
        CHECK(t.is_trap(0));
        CHECK(t.thetas[0].has_value());
        CHECK(t.rs[0].has_value());
        CHECK(t.is_dummy(1));
        CHECK_FALSE(t.thetas[1].has_value());
    }
    CHECK(saw_zero);

    const std::vector<Bit> too_many{0, 1};
    CHECK(error_of([&] { sample_secrets(RoundKind::computation, wire, too_many, rng); }) == ErrorCode::input);
}

TEST_CASE("sample_secrets draws theta, r, d and colour uniformly") {
    Rng rng(11);
    const auto line = pattern::three_qubit_line();
    const std::vector<Bit> x{0};
    constexpr std::uint64_t N = 80000;
    std::array<std::uint64_t, 8> theta{};
    std::uint64_t r_ones = 0;
    for (std::uint64_t i = 0; i < N; ++i) {
        const auto s = sample_secrets(RoundKind::computation, line, x, rng);
        ++theta[s.thetas[1]->k()];
        r_ones += *s.rs[2];
    }
    for (auto c : theta) CHECK(within_sigma(c, N, 1.0 / 8));
    CHECK(within_sigma(r_ones, N, 0.5));

    std::uint64_t colour0 = 0, d_ones = 0, dummies = 0;
    for (std::uint64_t i = 0; i < N; ++i) {
        const auto s = sample_secrets(RoundKind::test, line, {}, rng);
        colour0 += *s.trap_color == 0;
        for (Vertex v = 0; v < 3; ++v) {
            if (s.is_dummy(v)) {
                ++dummies;
                d_ones += *s.dummies[v];
            }
        }
    }
    CHECK(within_sigma(colour0, N, 0.5));
    CHECK(within_sigma(d_ones, dummies, 0.5));
}

TEST_CASE("corrected_phi examples") {
    const auto p = line_with_phi2(1);
    std::vector<std::optional<Bit>> decoded(3);
    auto phi = [&](Bit sx, Bit sz) {
        decoded[1] = sx;  // x_deps(2) = {1}
        decoded[0] = sz;  // z_deps(2) = {0}
        return corrected_phi(2, p, decoded);
    };
    CHECK(phi(0, 0) == Angle(1));
    CHECK(phi(1, 0) == Angle(7));
    CHECK(phi(1, 1) == Angle(3));
    CHECK(phi(0, 1) == Angle(5));

    std::vector<std::optional<Bit>> missing(3);
    missing[1] = 0;
    CHECK(error_of([&] { corrected_phi(2, p, missing); }) == ErrorCode::protocol_order);
}

TEST_CASE("delta_computation examples") {
    // phi' = 3pi/4 on vertex 2 (not an input), theta = pi/2, r = 0
    {
        const auto p = line_with_phi2(3);
        auto s = computation_secrets(3, {0});
        s.thetas[2] = Angle(2);
        std::vector<std::optional<Bit>> decoded{Bit{0}, Bit{0}, std::nullopt};
        CHECK(delta_computation(2, s, p, decoded) == Angle(5));
    }
    // phi' = 0, theta = 0, r = 1
    {
        const auto p = line_with_phi2(0);
        auto s = computation_secrets(3, {0});
        s.rs[2] = 1;
        std::vector<std::optional<Bit>> decoded{Bit{0}, Bit{0}, std::nullopt};
        CHECK(delta_computation(2, s, p, decoded) == Angle(4));
    }
    // input vertex with x = 1, phi' = 0, theta = pi/4, r = 0
    {
        const auto p = line_with_phi2(0);
        auto s = computation_secrets(3, {1});
        s.thetas[0] = Angle(1);
        std::vector<std::optional<Bit>> decoded(3);
        CHECK(delta_computation(0, s, p, decoded) == Angle(5));
    }
}

TEST_CASE("delta_test examples") {
    Rng rng(8);
    RoundSecrets s;
    s.kind = RoundKind::test;
    s.thetas = {Angle(1), std::nullopt};
    s.rs = {Bit{1}, std::nullopt};
    s.dummies = {std::nullopt, Bit{0}};
    s.trap_color = 0;
    CHECK(delta_test(0, s, rng) == Angle(5));
    s.thetas[0] = Angle(0);
    s.rs[0] = 0;
    CHECK(delta_test(0, s, rng) == Angle(0));

    constexpr std::uint64_t N = 80000;
    std::array<std::uint64_t, 8> counts{};
    for (std::uint64_t i = 0; i < N; ++i) ++counts[delta_test(1, s, rng).k()];
    for (auto c : counts) CHECK(within_sigma(c, N, 1.0 / 8));
    CHECK(vbqc::test::uniform_p_value(counts) > 1e-4);
}

TEST_CASE("decode_outcome examples") {
    auto s = computation_secrets(1);
    s.rs[0] = 1;
    CHECK(decode_outcome(0, 1, s) == 0);
    CHECK(decode_outcome(0, 0, s) == 1);
    s.rs[0] = 0;
    CHECK(decode_outcome(0, 1, s) == 1);

    RoundSecrets t;
    t.kind = RoundKind::test;
    t.thetas = {std::nullopt};
    t.rs = {std::nullopt};
    t.dummies = {Bit{1}};
    CHECK(error_of([&] { decode_outcome(0, 1, t); }) == ErrorCode::input);
}

TEST_CASE("trap_expected examples") {
    RoundSecrets s;
    s.kind = RoundKind::test;
    s.trap_color = 0;

    const pattern::Graph isolated(1, {});
    s.thetas = {Angle(0)};
    s.rs = {Bit{0}};
    s.dummies = {std::nullopt};
    CHECK(trap_expected(0, s, isolated) == 0);

    const auto p2 = pattern::Graph::path(2);
    s.thetas = {Angle(0), std::nullopt};
    s.rs = {Bit{1}, std::nullopt};
    s.dummies = {std::nullopt, Bit{1}};
    CHECK(trap_expected(0, s, p2) == 0);
    CHECK(error_of([&] { trap_expected(1, s, p2); }) == ErrorCode::input);

    const auto star = pattern::Graph::star(2);
    s.thetas = {Angle(0), std::nullopt, std::nullopt};
    s.rs = {Bit{0}, std::nullopt, std::nullopt};
    s.dummies = {std::nullopt, Bit{1}, Bit{1}};
    CHECK(trap_expected(0, s, star) == 0);
}

TEST_CASE("delta marginal is uniform for one vertex, every phi and x") {
    auto p = pattern::single_qubit_identity();
    for (int phi = 0; phi < 8; ++phi) {
        p.angles[0] = Angle(phi);
        for (Bit x = 0; x < 2; ++x) {
            std::array<int, 8> counts{};
            for (int theta = 0; theta < 8; ++theta) {
                for (Bit r = 0; r < 2; ++r) {
                    auto s = computation_secrets(1, {x});
                    s.thetas[0] = Angle(theta);
                    s.rs[0] = r;
                    std::vector<std::optional<Bit>> decoded(1);
                    ++counts[delta_computation(0, s, p, decoded).k()];
                }
            }
            for (int c : counts) CHECK(c == 2);
        }
    }
}

TEST_CASE("pack_output orders bits by the outputs list") {
    auto p = pattern::three_qubit_line();
    std::vector<std::optional<Bit>> decoded{Bit{0}, Bit{1}, Bit{1}};
    CHECK(pack_output(p, decoded) == 1);
    decoded[2] = 0;
    CHECK(pack_output(p, decoded) == 0);
}
