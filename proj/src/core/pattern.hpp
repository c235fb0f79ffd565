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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "angle.hpp"

namespace vbqc::pattern {

using Edge = std::pair<Vertex, Vertex>;

/// Undirected simple graph plus the total order in which vertices are
/// measured. Immutable once built.
class Graph {
public:
    Graph() = default;
    /// Throws Error(input) on self-loops, out-of-range endpoints, or an
    /// ordering that is not a permutation. An empty ordering means 0..n-1.
    Graph(std::size_t vertex_count, std::vector<Edge> edges, std::vector<Vertex> ordering = {});

    static Graph path(std::size_t vertex_count);
    static Graph cycle(std::size_t vertex_count);
    static Graph star(std::size_t leaves);  // centre is vertex 0

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const Vertex> neighbours(Vertex v) const { return adjacency_.at(v); }
    bool adjacent(Vertex a, Vertex b) const;
    std::size_t max_degree() const;

    std::span<const Vertex> ordering() const { return ordering_; }
    /// Index of `v` in the measurement order.
    std::size_t position(Vertex v) const { return position_.at(v); }
    bool precedes(Vertex a, Vertex b) const { return position(a) < position(b); }

private:
    std::vector<Edge> edges_;  // normalised (min, max), sorted, unique
    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<Vertex> ordering_;
    std::vector<std::size_t> position_;
};

struct Coloring {
    std::vector<std::vector<Vertex>> classes;

    std::size_t size() const { return classes.size(); }
    /// Class index per vertex; requires a valid colouring.
    std::vector<std::size_t> class_of(std::size_t vertex_count) const;
};

struct ColoringCheck {
    enum class Problem { none, adjacent, missing, duplicate };
    Problem problem = Problem::none;
    Vertex vertex = 0;
    Vertex other = 0;  // the neighbour for `adjacent`

    bool valid() const { return problem == Problem::none; }
    std::string describe() const;
};

/// Partition + independence check. Reports the first violation found, scanning
/// classes in order. Throws Error(input) if a class names a vertex out of range.
ColoringCheck validate_coloring(const Graph &graph, std::span<const std::vector<Vertex>> classes);

/// First-fit colouring along `scan_order` (empty = 0..n-1). Uses at most
/// max_degree + 1 classes; vertices inside a class are sorted.
Coloring greedy_coloring(const Graph &graph, std::span<const Vertex> scan_order = {});

/// Earlier vertices whose decoded outcomes feed the X and Z corrections.
struct DependencyStructure {
    std::vector<std::vector<Vertex>> x_deps;
    std::vector<std::vector<Vertex>> z_deps;
};

/// Causal-flow successor map, v -> f(v), over the non-output vertices.
using Flow = std::map<Vertex, Vertex>;

/// X-correction on f(v), Z-correction on N(f(v)) \ {v}. Throws Error(input)
/// naming the offending vertex when the flow is not a causal flow on `graph`.
DependencyStructure derive_dependencies(const Graph &graph, std::span<const Vertex> inputs,
                                        std::span<const Vertex> outputs, const Flow &flow);

/// Checks that every dependency precedes its dependent in the measurement order.
void check_dependencies(const Graph &graph, const DependencyStructure &deps);

struct MeasurementPattern {
    Graph graph;
    std::vector<Vertex> inputs;
    std::vector<Vertex> outputs;
    std::vector<Angle> angles;
    DependencyStructure deps;
    Coloring coloring;
    std::optional<Flow> flow;  // kept for serialisation when deps came from a flow

    std::size_t vertex_count() const { return graph.vertex_count(); }
    std::size_t colour_count() const { return coloring.size(); }
    bool is_input(Vertex v) const;
    /// Position of `v` in `inputs`, if it is one.
    std::optional<std::size_t> input_index(Vertex v) const;

    /// Validates every invariant; throws Error(input).
    void validate() const;
};

/// Assembles and validates a pattern. With no colouring, a greedy colouring
/// along the measurement order is used.
MeasurementPattern make_pattern(Graph graph, std::vector<Vertex> inputs, std::vector<Vertex> outputs,
                                std::vector<Angle> angles, const Flow &flow,
                                std::optional<Coloring> coloring = std::nullopt);
MeasurementPattern make_pattern(Graph graph, std::vector<Vertex> inputs, std::vector<Vertex> outputs,
                                std::vector<Angle> angles, DependencyStructure deps,
                                std::optional<Coloring> coloring = std::nullopt);

/// Desk-scale fixtures with deterministic classical output y = x.
MeasurementPattern single_qubit_identity();
MeasurementPattern two_qubit_wire();
MeasurementPattern three_qubit_line();
/// One input/output qubit measured at k*pi/4: a biased coin with
/// Pr[y != x] = sin^2(k*pi/8).
MeasurementPattern rotation(int k);

/// Text format, see README ("Pattern files").
MeasurementPattern parse_pattern(const std::string &text);
MeasurementPattern load_pattern(const std::string &path);
std::string format_pattern(const MeasurementPattern &pattern);

}  // namespace vbqc::pattern
