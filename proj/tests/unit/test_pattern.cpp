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

#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "pattern.hpp"
#include "rng.hpp"
#include "support.hpp"

using namespace vbqc;
using namespace vbqc::pattern;
using vbqc::test::error_of;

TEST_CASE("validate_coloring on small paths") {
    const auto p2 = Graph::path(2);
    CHECK(validate_coloring(p2, std::vector<std::vector<Vertex>>{{0}, {1}}).valid());

    const auto bad = validate_coloring(p2, std::vector<std::vector<Vertex>>{{0, 1}});
    CHECK_FALSE(bad.valid());
    CHECK(bad.problem == ColoringCheck::Problem::adjacent);
    CHECK(bad.vertex == 0);
    CHECK(bad.other == 1);

    CHECK(validate_coloring(Graph::path(3), std::vector<std::vector<Vertex>>{{0, 2}, {1}}).valid());
}

TEST_CASE("validate_coloring reports missing and duplicated vertices") {
    const auto g = Graph::path(3);
    const auto missing = validate_coloring(g, std::vector<std::vector<Vertex>>{{0, 2}});
    CHECK(missing.problem == ColoringCheck::Problem::missing);
    CHECK(missing.vertex == 1);

    const auto dup = validate_coloring(g, std::vector<std::vector<Vertex>>{{0, 2}, {1, 2}});
    CHECK(dup.problem == ColoringCheck::Problem::duplicate);
    CHECK(dup.vertex == 2);

    CHECK(error_of([&] { validate_coloring(g, std::vector<std::vector<Vertex>>{{0, 7}, {1}}); }) == ErrorCode::input);
}

TEST_CASE("greedy_coloring examples") {
    CHECK(greedy_coloring(Graph::path(2)).size() == 2);
    CHECK(greedy_coloring(Graph(4, {})).size() == 1);

    const auto c4 = greedy_coloring(Graph::cycle(4));
    REQUIRE(c4.size() == 2);
    CHECK(c4.classes[0] == std::vector<Vertex>{0, 2});
    CHECK(c4.classes[1] == std::vector<Vertex>{1, 3});
    CHECK(validate_coloring(Graph::cycle(4), c4.classes).valid());
}

TEST_CASE("greedy_coloring is valid and within max_degree + 1 on random graphs") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<Edge> edges;
        const double density = rng.uniform();
        for (Vertex a = 0; a < n; ++a) {
            for (Vertex b = a + 1; b < n; ++b) {
                if (rng.bernoulli(density)) edges.emplace_back(a, b);
            }
        }
        std::vector<Vertex> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        const Graph g(n, edges);
        const auto c = greedy_coloring(g, order);
        CHECK(validate_coloring(g, c.classes).valid());
        CHECK(c.size() <= g.max_degree() + 1);
        CHECK(greedy_coloring(g, order).classes == c.classes);
    }
}

TEST_CASE("graph construction rejects malformed input") {
    CHECK(error_of([] { Graph(2, {{0, 0}}); }) == ErrorCode::input);
    CHECK(error_of([] { Graph(2, {{0, 2}}); }) == ErrorCode::input);
    CHECK(error_of([] { Graph(3, {}, {0, 1, 1}); }) == ErrorCode::input);
    const Graph g(3, {{1, 0}, {0, 1}, {2, 1}});
    CHECK(g.edges().size() == 2);
    CHECK(g.adjacent(1, 2));
    CHECK_FALSE(g.adjacent(0, 2));
}

TEST_CASE("derive_dependencies follows the causal-flow rule") {
    SUBCASE("2-vertex path") {
        const std::vector<Vertex> in{0}, out{1};
        const auto d = derive_dependencies(Graph::path(2), in, out, {{0, 1}});
        CHECK(d.x_deps[1] == std::vector<Vertex>{0});
        CHECK(d.z_deps[1].empty());
        CHECK(d.x_deps[0].empty());
    }
    SUBCASE("3-vertex path") {
        const std::vector<Vertex> in{0}, out{2};
        const auto d = derive_dependencies(Graph::path(3), in, out, {{0, 1}, {1, 2}});
        CHECK(d.x_deps[1] == std::vector<Vertex>{0});
        CHECK(d.x_deps[2] == std::vector<Vertex>{1});
        CHECK(d.z_deps[2] == std::vector<Vertex>{0});
        CHECK(d.z_deps[1].empty());
    }
    SUBCASE("edgeless graph") {
        const std::vector<Vertex> io{0, 1, 2};
        const auto d = derive_dependencies(Graph(3, {}), io, io, {});
        for (std::size_t v = 0; v < 3; ++v) {
            CHECK(d.x_deps[v].empty());
            CHECK(d.z_deps[v].empty());
        }
    }
}

TEST_CASE("derive_dependencies rejects flows that are not causal") {
    const std::vector<Vertex> in{0}, out{2};
    // not adjacent
    CHECK(error_of([&] { derive_dependencies(Graph::path(3), in, out, {{0, 2}, {1, 2}}); }) == ErrorCode::input);
    // not injective
    const Graph star = Graph::star(2);
    const std::vector<Vertex> s_in{1}, s_out{0};
    CHECK(error_of([&] { derive_dependencies(star, s_in, s_out, {{1, 0}, {2, 0}}); }) == ErrorCode::input);
    // backwards in the order
    const Graph rev(2, {{0, 1}}, {1, 0});
    const std::vector<Vertex> r_in{0}, r_out{1};
    CHECK(error_of([&] { derive_dependencies(rev, r_in, r_out, {{0, 1}}); }) == ErrorCode::input);
}

TEST_CASE("builtin patterns validate and round-trip through text") {
    for (const auto &p : {single_qubit_identity(), two_qubit_wire(), three_qubit_line(), rotation(3)}) {
        p.validate();
        const auto text = format_pattern(p);
        const auto back = parse_pattern(text);
        CHECK(format_pattern(back) == text);
        CHECK(back.vertex_count() == p.vertex_count());
        CHECK(back.deps.x_deps == p.deps.x_deps);
        CHECK(back.deps.z_deps == p.deps.z_deps);
    }
}

TEST_CASE("pattern parser errors") {
    CHECK(error_of([] { parse_pattern("vbqc-pattern 2\nvertices 1\n"); }) == ErrorCode::version);
    CHECK(error_of([] { parse_pattern("something 1\n"); }) == ErrorCode::parse);
    CHECK(error_of([] {
              parse_pattern("vbqc-pattern 1\nvertices 2\nedge 0 1\ninputs 0\noutputs 1\nangles 0 0\nflow 0 1\ncolour 0 1\n");
          }) == ErrorCode::input);
}

TEST_CASE("pattern without colour lines gets a greedy colouring") {
    const auto p = parse_pattern("vbqc-pattern 1\nvertices 3\nedge 0 1\nedge 1 2\ninputs 0\noutputs 2\nangles 0 0 0\n"
                                 "flow 0 1\nflow 1 2\n");
    CHECK(p.colour_count() == 2);
    CHECK(validate_coloring(p.graph, p.coloring.classes).valid());
}
