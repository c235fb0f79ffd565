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

#include "pattern.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "textfile.hpp"

namespace vbqc::pattern {

namespace {

std::string vname(Vertex v) { return "vertex " + std::to_string(v); }

void check_vertex(const Graph &g, Vertex v, const char *what) {
    if (v >= g.vertex_count()) {
        fail(ErrorCode::input, std::string(what) + ": " + vname(v) + " out of range (vertex_count " +
                                   std::to_string(g.vertex_count()) + ")");
    }
}

}  // namespace

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges, std::vector<Vertex> ordering)
    : adjacency_(vertex_count) {
    if (vertex_count == 0) fail(ErrorCode::input, "graph needs at least one vertex");
    for (auto &[a, b] : edges) {
        if (a >= vertex_count || b >= vertex_count) {
            fail(ErrorCode::input, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                       ") has an endpoint >= vertex_count " + std::to_string(vertex_count));
        }
        if (a == b) fail(ErrorCode::input, "self-loop on " + vname(a));
        if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (auto [a, b] : edges_) {
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
    }
    for (auto &adj : adjacency_) std::sort(adj.begin(), adj.end());

    if (ordering.empty()) {
        ordering.resize(vertex_count);
        std::iota(ordering.begin(), ordering.end(), Vertex{0});
    }
    if (ordering.size() != vertex_count) fail(ErrorCode::input, "ordering is not a permutation of the vertices");
    position_.assign(vertex_count, vertex_count);
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        Vertex v = ordering[i];
        if (v >= vertex_count || position_[v] != vertex_count) {
            fail(ErrorCode::input, "ordering is not a permutation of the vertices (at " + vname(v) + ")");
        }
        position_[v] = i;
    }
    ordering_ = std::move(ordering);
}

Graph Graph::path(std::size_t vertex_count) {
    std::vector<Edge> e;
    for (Vertex v = 0; v + 1 < vertex_count; ++v) e.emplace_back(v, v + 1);
    return Graph(vertex_count, std::move(e));
}

Graph Graph::cycle(std::size_t vertex_count) {
    std::vector<Edge> e;
    for (Vertex v = 0; v < vertex_count; ++v) e.emplace_back(v, static_cast<Vertex>((v + 1) % vertex_count));
    return Graph(vertex_count, std::move(e));
}

Graph Graph::star(std::size_t leaves) {
    std::vector<Edge> e;
    for (Vertex v = 1; v <= leaves; ++v) e.emplace_back(0, v);
    return Graph(leaves + 1, std::move(e));
}

bool Graph::adjacent(Vertex a, Vertex b) const {
    const auto &adj = adjacency_.at(a);
    return std::binary_search(adj.begin(), adj.end(), b);
}

std::size_t Graph::max_degree() const {
    std::size_t m = 0;
    for (const auto &adj : adjacency_) m = std::max(m, adj.size());
    return m;
}

std::vector<std::size_t> Coloring::class_of(std::size_t vertex_count) const {
    std::vector<std::size_t> out(vertex_count, classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (Vertex v : classes[c]) out.at(v) = c;
    }
    return out;
}

std::string ColoringCheck::describe() const {
    switch (problem) {
        case Problem::none: return "valid";
        case Problem::adjacent:
            return "adjacent vertices " + std::to_string(vertex) + " and " + std::to_string(other) + " share a class";
        case Problem::missing: return "vertex " + std::to_string(vertex) + " is in no class";
        case Problem::duplicate: return "vertex " + std::to_string(vertex) + " appears more than once";
    }
    return "?";
}

ColoringCheck validate_coloring(const Graph &graph, std::span<const std::vector<Vertex>> classes) {
    const std::size_t n = graph.vertex_count();
    for (const auto &cls : classes) {
        for (Vertex v : cls) check_vertex(graph, v, "colouring");
    }
    std::vector<std::size_t> owner(n, classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (Vertex v : classes[c]) {
            if (owner[v] != classes.size()) return {ColoringCheck::Problem::duplicate, v, v};
            owner[v] = c;
        }
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (Vertex v : classes[c]) {
            for (Vertex u : graph.neighbours(v)) {
                if (owner[u] == c) return {ColoringCheck::Problem::adjacent, std::min(u, v), std::max(u, v)};
            }
        }
    }
    for (Vertex v = 0; v < n; ++v) {
        if (owner[v] == classes.size()) return {ColoringCheck::Problem::missing, v, v};
    }
    return {};
}

Coloring greedy_coloring(const Graph &graph, std::span<const Vertex> scan_order) {
    const std::size_t n = graph.vertex_count();
    std::vector<Vertex> order(scan_order.begin(), scan_order.end());
    if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), Vertex{0});
    }
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> colour(n, unset);
    std::size_t used = 0;
    std::vector<char> taken;
    for (Vertex v : order) {
        check_vertex(graph, v, "scan order");
        if (colour[v] != unset) fail(ErrorCode::input, "scan order repeats " + vname(v));
        taken.assign(used + 1, 0);
        for (Vertex u : graph.neighbours(v)) {
            if (colour[u] != unset) taken[colour[u]] = 1;
        }
        std::size_t c = 0;
        while (taken[c]) ++c;
        colour[v] = c;
        used = std::max(used, c + 1);
    }
    Coloring out;
    out.classes.resize(used);
    for (Vertex v = 0; v < n; ++v) {
        if (colour[v] == unset) fail(ErrorCode::input, "scan order misses " + vname(v));
        out.classes[colour[v]].push_back(v);
    }
    return out;
}

DependencyStructure derive_dependencies(const Graph &graph, std::span<const Vertex> inputs,
                                        std::span<const Vertex> outputs, const Flow &flow) {
    const std::size_t n = graph.vertex_count();
    std::vector<char> is_in(n, 0), is_out(n, 0);
    for (Vertex v : inputs) check_vertex(graph, v, "inputs"), is_in[v] = 1;
    for (Vertex v : outputs) check_vertex(graph, v, "outputs"), is_out[v] = 1;

    std::vector<char> hit(n, 0);
    for (auto [v, fv] : flow) {
        check_vertex(graph, v, "flow");
        check_vertex(graph, fv, "flow");
        if (is_out[v]) fail(ErrorCode::input, "flow defined on output " + vname(v));
        if (is_in[fv]) fail(ErrorCode::input, "flow of " + vname(v) + " lands on input " + vname(fv));
        if (!graph.adjacent(v, fv)) fail(ErrorCode::input, "flow of " + vname(v) + " is not a neighbour");
        if (!graph.precedes(v, fv)) fail(ErrorCode::input, "flow of " + vname(v) + " is not measured after it");
        if (hit[fv]) fail(ErrorCode::input, "flow is not injective at " + vname(v));
        hit[fv] = 1;
        for (Vertex w : graph.neighbours(fv)) {
            if (w != v && graph.precedes(w, v)) {
                fail(ErrorCode::input, "flow of " + vname(v) + " has neighbour " + std::to_string(w) +
                                           " measured before " + vname(v));
            }
        }
    }
    for (Vertex v = 0; v < n; ++v) {
        if (!is_out[v] && !flow.contains(v)) fail(ErrorCode::input, "flow missing for non-output " + vname(v));
    }

    DependencyStructure deps;
    deps.x_deps.resize(n);
    deps.z_deps.resize(n);
    for (auto [v, fv] : flow) {
        deps.x_deps[fv].push_back(v);
        for (Vertex w : graph.neighbours(fv)) {
            if (w != v) deps.z_deps[w].push_back(v);
        }
    }
    for (auto &d : deps.x_deps) std::sort(d.begin(), d.end());
    for (auto &d : deps.z_deps) std::sort(d.begin(), d.end());
    check_dependencies(graph, deps);
    return deps;
}

void check_dependencies(const Graph &graph, const DependencyStructure &deps) {
    const std::size_t n = graph.vertex_count();
    if (deps.x_deps.size() != n || deps.z_deps.size() != n) {
        fail(ErrorCode::input, "dependency structure must list every vertex");
    }
    for (Vertex w = 0; w < n; ++w) {
        for (const auto *set : {&deps.x_deps[w], &deps.z_deps[w]}) {
            for (Vertex v : *set) {
                check_vertex(graph, v, "dependency");
                if (!graph.precedes(v, w)) {
                    fail(ErrorCode::input, "dependency " + vname(v) + " of " + vname(w) + " is not measured before it");
                }
            }
        }
    }
}

bool MeasurementPattern::is_input(Vertex v) const { return input_index(v).has_value(); }

std::optional<std::size_t> MeasurementPattern::input_index(Vertex v) const {
    auto it = std::find(inputs.begin(), inputs.end(), v);
    if (it == inputs.end()) return std::nullopt;
    return static_cast<std::size_t>(it - inputs.begin());
}

void MeasurementPattern::validate() const {
    const std::size_t n = graph.vertex_count();
    if (angles.size() != n) fail(ErrorCode::input, "need one angle per vertex");
    for (const auto *set : {&inputs, &outputs}) {
        std::vector<char> seen(n, 0);
        for (Vertex v : *set) {
            check_vertex(graph, v, set == &inputs ? "inputs" : "outputs");
            if (seen[v]) fail(ErrorCode::input, "repeated " + vname(v) + " in I/O set");
            seen[v] = 1;
        }
    }
    if (outputs.empty()) fail(ErrorCode::input, "pattern needs at least one output");
    if (outputs.size() > 63) fail(ErrorCode::capacity, "at most 63 output vertices are supported");
    check_dependencies(graph, deps);
    auto check = validate_coloring(graph, coloring.classes);
    if (!check.valid()) fail(ErrorCode::input, "invalid colouring: " + check.describe());
    for (const auto &cls : coloring.classes) {
        if (cls.empty()) fail(ErrorCode::input, "invalid colouring: empty class");
    }
}

MeasurementPattern make_pattern(Graph graph, std::vector<Vertex> inputs, std::vector<Vertex> outputs,
                                std::vector<Angle> angles, DependencyStructure deps,
                                std::optional<Coloring> coloring) {
    MeasurementPattern p;
    p.coloring = coloring ? std::move(*coloring) : greedy_coloring(graph, graph.ordering());
    p.graph = std::move(graph);
    p.inputs = std::move(inputs);
    p.outputs = std::move(outputs);
    p.angles = std::move(angles);
    p.deps = std::move(deps);
    p.validate();
    return p;
}

MeasurementPattern make_pattern(Graph graph, std::vector<Vertex> inputs, std::vector<Vertex> outputs,
                                std::vector<Angle> angles, const Flow &flow, std::optional<Coloring> coloring) {
    auto deps = derive_dependencies(graph, inputs, outputs, flow);
    auto p = make_pattern(std::move(graph), std::move(inputs), std::move(outputs), std::move(angles),
                          std::move(deps), std::move(coloring));
    p.flow = flow;
    return p;
}

MeasurementPattern single_qubit_identity() { return rotation(0); }

MeasurementPattern rotation(int k) {
    return make_pattern(Graph(1, {}), {0}, {0}, {Angle(k)}, Flow{});
}

MeasurementPattern two_qubit_wire() {
    return make_pattern(Graph::path(2), {0}, {1}, {Angle(2), Angle(2)}, Flow{{0, 1}});
}

MeasurementPattern three_qubit_line() {
    return make_pattern(Graph::path(3), {0}, {2}, {Angle(0), Angle(0), Angle(0)}, Flow{{0, 1}, {1, 2}});
}

MeasurementPattern parse_pattern(const std::string &contents) {
    auto lines = text::read_lines(contents, "vbqc-pattern", 1);
    std::optional<std::size_t> n;
    std::vector<Edge> edges;
    std::vector<Vertex> order, inputs, outputs;
    std::vector<Angle> angles;
    Flow flow;
    DependencyStructure deps;
    bool have_deps = false;
    Coloring coloring;

    auto vertices_of = [&](const text::Line &line, std::size_t from) {
        std::vector<Vertex> out;
        for (std::size_t i = from; i < line.args.size(); ++i) {
            out.push_back(static_cast<Vertex>(text::to_uint(line, line.args[i])));
        }
        return out;
    };
    auto need_n = [&](const text::Line &line) {
        if (!n) text::bad_line(line, "'vertices' must come first");
        return *n;
    };

    for (const auto &line : lines) {
        const auto &kw = line.keyword;
        if (kw == "vertices") {
            text::expect_args(line, 1, 1);
            n = text::to_uint(line, line.args[0]);
            deps.x_deps.assign(*n, {});
            deps.z_deps.assign(*n, {});
        } else if (kw == "edge") {
            text::expect_args(line, 2, 2);
            auto e = vertices_of(line, 0);
            edges.emplace_back(e[0], e[1]);
        } else if (kw == "order") {
            order = vertices_of(line, 0);
        } else if (kw == "inputs") {
            inputs = vertices_of(line, 0);
        } else if (kw == "outputs") {
            outputs = vertices_of(line, 0);
        } else if (kw == "angles") {
            for (const auto &a : line.args) {
                auto k = text::to_int(line, a);
                if (k < 0 || k > 7) text::bad_line(line, "angles are k in 0..7 (multiples of pi/4)");
                angles.emplace_back(static_cast<int>(k));
            }
        } else if (kw == "flow") {
            text::expect_args(line, 2, 2);
            auto e = vertices_of(line, 0);
            if (!flow.emplace(e[0], e[1]).second) text::bad_line(line, "flow defined twice");
        } else if (kw == "xdeps" || kw == "zdeps") {
            text::expect_args(line, 1, SIZE_MAX);
            auto vs = vertices_of(line, 0);
            if (vs[0] >= need_n(line)) text::bad_line(line, "vertex out of range");
            auto &slot = (kw == "xdeps" ? deps.x_deps : deps.z_deps)[vs[0]];
            slot.assign(vs.begin() + 1, vs.end());
            have_deps = true;
        } else if (kw == "colour" || kw == "color") {
            text::expect_args(line, 1, SIZE_MAX);
            coloring.classes.push_back(vertices_of(line, 0));
        } else {
            text::bad_line(line, "unknown field");
        }
    }
    if (!n) fail(ErrorCode::parse, "pattern: missing 'vertices'");
    if (!flow.empty() && have_deps) fail(ErrorCode::parse, "pattern: give either flow or xdeps/zdeps, not both");
    Graph graph(*n, std::move(edges), std::move(order));
    std::optional<Coloring> col;
    if (!coloring.classes.empty()) col = std::move(coloring);
    if (have_deps) {
        return make_pattern(std::move(graph), std::move(inputs), std::move(outputs), std::move(angles),
                            std::move(deps), std::move(col));
    }
    return make_pattern(std::move(graph), std::move(inputs), std::move(outputs), std::move(angles), flow,
                        std::move(col));
}

MeasurementPattern load_pattern(const std::string &path) { return parse_pattern(text::read_file(path)); }

std::string format_pattern(const MeasurementPattern &p) {
    std::ostringstream out;
    auto list = [&](const char *kw, std::span<const Vertex> vs) {
        out << kw;
        for (Vertex v : vs) out << ' ' << v;
        out << '\n';
    };
    out << "vbqc-pattern 1\n";
    out << "vertices " << p.vertex_count() << '\n';
    for (auto [a, b] : p.graph.edges()) out << "edge " << a << ' ' << b << '\n';
    list("order", p.graph.ordering());
    list("inputs", p.inputs);
    list("outputs", p.outputs);
    out << "angles";
    for (Angle a : p.angles) out << ' ' << static_cast<int>(a.k());
    out << '\n';
    if (p.flow) {
        for (auto [v, fv] : *p.flow) out << "flow " << v << ' ' << fv << '\n';
    } else {
        for (Vertex v = 0; v < p.vertex_count(); ++v) {
            if (!p.deps.x_deps[v].empty()) {
                out << "xdeps " << v;
                for (Vertex u : p.deps.x_deps[v]) out << ' ' << u;
                out << '\n';
            }
            if (!p.deps.z_deps[v].empty()) {
                out << "zdeps " << v;
                for (Vertex u : p.deps.z_deps[v]) out << ' ' << u;
                out << '\n';
            }
        }
    }
    for (const auto &cls : p.coloring.classes) list("colour", cls);
    return out.str();
}

}  // namespace vbqc::pattern
