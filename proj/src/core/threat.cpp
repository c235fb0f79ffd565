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

#include "threat.hpp"

#include <algorithm>
#include <sstream>

#include "error.hpp"

namespace vbqc::threat {

const char *stage_name(Stage s) {
    switch (s) {
        case Stage::after_prep: return "after-prep";
        case Stage::after_entangle: return "after-entangle";
        case Stage::before_measure: return "before-measure";
    }
    return "?";
}

const char *frame_name(Frame f) { return f == Frame::measurement ? "measurement" : "physical"; }

Action Action::make_unitary(const sv::Matrix2 &u) {
    if (!sv::is_unitary(u)) fail(ErrorCode::script, "unitary action is not unitary within 1e-10");
    Action a;
    a.kind = Kind::unitary;
    a.unitary = u;
    return a;
}

std::vector<Directive> AttackScript::resolve(std::uint32_t round, std::size_t vertex_count, Rng &rng) const {
    std::vector<Directive> out = every_round;
    if (auto it = rounds.find(round); it != rounds.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    for (auto &d : out) {
        if (!d.vertex || selection == Selection::uniformly_random_vertex) {
            d.vertex = static_cast<Vertex>(rng.below(vertex_count));
        }
    }
    return out;
}

void AttackScript::validate(std::size_t vertex_count) const {
    auto check = [&](const Directive &d) {
        if (d.vertex && *d.vertex >= vertex_count) {
            fail(ErrorCode::script, "attack on vertex " + std::to_string(*d.vertex) + " but the round has only " +
                                        std::to_string(vertex_count) + " qubits");
        }
        if (d.when && d.when->vertex >= vertex_count) fail(ErrorCode::script, "condition on a missing vertex");
        if (d.action.kind == Action::Kind::pauli && d.action.frame == Frame::measurement &&
            d.stage != Stage::before_measure) {
            fail(ErrorCode::script, "measurement-frame Paulis only exist at before-measure");
        }
        if ((d.action.kind == Action::Kind::wrong_angle || d.action.kind == Action::Kind::lie) &&
            d.stage != Stage::before_measure) {
            fail(ErrorCode::script, "wrong-angle and lie act at before-measure");
        }
        if (d.action.kind == Action::Kind::unitary && !sv::is_unitary(d.action.unitary)) {
            fail(ErrorCode::script, "unitary action is not unitary within 1e-10");
        }
    };
    for (const auto &d : every_round) check(d);
    for (const auto &[j, ds] : rounds) {
        for (const auto &d : ds) check(d);
    }
}

PauliRates NoiseModel::rates_for(std::uint32_t round, Vertex v) const {
    if (kind == Kind::none || kind == Kind::damping) return {};
    if (round_dependence == RoundDependence::schedule) {
        if (auto it = schedule.find(round); it != schedule.end()) return it->second;
    }
    if (kind == Kind::per_round_channel) {
        if (auto it = per_vertex.find(v); it != per_vertex.end()) return it->second;
    }
    return rates;
}

void NoiseModel::validate() const {
    auto check = [](const PauliRates &r) {
        for (double x : {r.px, r.py, r.pz}) {
            if (!(x >= 0 && x <= 1)) fail(ErrorCode::input, "Pauli probability outside [0,1]");
        }
        if (r.px + r.py + r.pz > 1 + 1e-12) fail(ErrorCode::input, "px + py + pz exceeds 1");
    };
    check(rates);
    for (const auto &[v, r] : per_vertex) check(r);
    for (const auto &[j, r] : schedule) check(r);
    if (!(gamma >= 0 && gamma <= 1)) fail(ErrorCode::input, "damping gamma outside [0,1]");
}

std::vector<std::pair<Vertex, Pauli>> instantiate_noise(const NoiseModel &model, std::uint32_t round,
                                                        std::size_t vertex_count, Rng &rng) {
    std::vector<std::pair<Vertex, Pauli>> out;
    if (model.kind == NoiseModel::Kind::none) return out;
    if (!model.is_pauli()) fail(ErrorCode::unsupported_model, "noise model is not a Pauli channel");
    for (Vertex v = 0; v < vertex_count; ++v) {
        const PauliRates r = model.rates_for(round, v);
        const double u = rng.uniform();
        if (u < r.px) out.emplace_back(v, Pauli::X);
        else if (u < r.px + r.py) out.emplace_back(v, Pauli::Y);
        else if (u < r.px + r.py + r.pz) out.emplace_back(v, Pauli::Z);
    }
    return out;
}

double trap_failure_probability(const NoiseModel &model, const pattern::MeasurementPattern &pattern,
                                std::size_t colour, std::uint32_t round) {
    if (!model.is_pauli()) fail(ErrorCode::unsupported_model, "trap failure needs a Pauli noise model");
    if (colour >= pattern.colour_count()) fail(ErrorCode::input, "colour " + std::to_string(colour) + " out of range");
    if (model.kind == NoiseModel::Kind::none) return 0;
    const auto &traps = pattern.coloring.classes[colour];
    const auto owner = pattern.coloring.class_of(pattern.vertex_count());

    // Given the dummy flips, traps fail independently: trap t passes iff its
    // own flip equals the parity of its flipped dummy neighbours.
    std::vector<Vertex> dummies;
    for (Vertex t : traps) {
        for (Vertex u : pattern.graph.neighbours(t)) {
            if (owner[u] != colour && std::find(dummies.begin(), dummies.end(), u) == dummies.end()) {
                dummies.push_back(u);
            }
        }
    }
    if (dummies.size() > 24) fail(ErrorCode::capacity, "too many dummy neighbours to enumerate exactly");
    std::vector<std::size_t> index(pattern.vertex_count(), SIZE_MAX);
    for (std::size_t i = 0; i < dummies.size(); ++i) index[dummies[i]] = i;

    double pass = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dummies.size()); ++mask) {
        double weight = 1;
        for (std::size_t i = 0; i < dummies.size(); ++i) {
            const double f = model.rates_for(round, dummies[i]).flip();
            weight *= (mask >> i & 1) ? f : 1 - f;
        }
        if (weight == 0) continue;
        for (Vertex t : traps) {
            Bit parity = 0;
            for (Vertex u : pattern.graph.neighbours(t)) {
                if (index[u] != SIZE_MAX) parity ^= static_cast<Bit>(mask >> index[u] & 1);
            }
            const double f = model.rates_for(round, t).flip();
            weight *= parity ? f : 1 - f;
        }
        pass += weight;
    }
    return std::clamp(1 - pass, 0.0, 1.0);
}

TrapFailureSummary trap_failure_summary(const NoiseModel &model, const pattern::MeasurementPattern &pattern,
                                        std::uint32_t round) {
    TrapFailureSummary s;
    for (std::size_t c = 0; c < pattern.colour_count(); ++c) {
        s.per_colour.push_back(trap_failure_probability(model, pattern, c, round));
    }
    s.min = *std::min_element(s.per_colour.begin(), s.per_colour.end());
    s.max = *std::max_element(s.per_colour.begin(), s.per_colour.end());
    for (double q : s.per_colour) s.mean += q;
    s.mean /= static_cast<double>(s.per_colour.size());
    return s;
}

AttackScript em_attack_build(std::uint32_t m, const ProtocolParams &params,
                             const pattern::MeasurementPattern &pattern, Pauli pauli, Rng &rng) {
    if (m > params.n()) {
        fail(ErrorCode::input, "E_m with m=" + std::to_string(m) + " exceeds n=" + std::to_string(params.n()));
    }
    AttackScript script;
    for (std::uint32_t j = 0; j < m; ++j) {
        Directive d;
        d.vertex = static_cast<Vertex>(rng.below(pattern.vertex_count()));
        d.stage = Stage::before_measure;
        d.action = Action::make_pauli(pauli, Frame::measurement);
        script.rounds[j].push_back(d);
    }
    return script;
}

namespace {

std::optional<std::set<std::uint32_t>> parse_rounds(const text::Line &line, const std::string &token) {
    if (token == "*") return std::nullopt;
    std::set<std::uint32_t> out;
    std::istringstream in(token);
    for (std::string part; std::getline(in, part, ',');) {
        out.insert(static_cast<std::uint32_t>(text::to_uint(line, part)));
    }
    return out;
}

std::string format_rounds(const std::optional<std::set<std::uint32_t>> &rounds) {
    if (!rounds) return "*";
    std::string s;
    for (auto j : *rounds) s += (s.empty() ? "" : ",") + std::to_string(j);
    return s;
}

Stage parse_stage(const text::Line &line, const std::string &token) {
    if (token == "after-prep") return Stage::after_prep;
    if (token == "after-entangle") return Stage::after_entangle;
    if (token == "before-measure") return Stage::before_measure;
    text::bad_line(line, "unknown stage '" + token + "'");
}

Pauli parse_pauli(const text::Line &line, const std::string &token) {
    if (token.size() != 1 || std::string("IXYZ").find(token[0]) == std::string::npos) {
        text::bad_line(line, "expected a Pauli I, X, Y or Z, got '" + token + "'");
    }
    return sv::pauli_from_char(token[0]);
}

PauliRates parse_rates(const text::Line &line, std::size_t from) {
    return {text::to_double(line, line.args[from]), text::to_double(line, line.args[from + 1]),
            text::to_double(line, line.args[from + 2])};
}

void parse_noise(const text::Line &line, NoiseModel &noise) {
    text::expect_args(line, 1, SIZE_MAX);
    const auto &what = line.args[0];
    if (what == "none") {
        text::expect_args(line, 1, 1);
        noise = NoiseModel{};
    } else if (what == "pauli") {
        text::expect_args(line, 4, 4);
        if (noise.kind != NoiseModel::Kind::per_round_channel) noise.kind = NoiseModel::Kind::per_qubit_pauli;
        noise.rates = parse_rates(line, 1);
    } else if (what == "vertex") {
        text::expect_args(line, 5, 5);
        noise.kind = NoiseModel::Kind::per_round_channel;
        noise.per_vertex[static_cast<Vertex>(text::to_uint(line, line.args[1]))] = parse_rates(line, 2);
    } else if (what == "round") {
        text::expect_args(line, 5, 5);
        if (noise.kind == NoiseModel::Kind::none) noise.kind = NoiseModel::Kind::per_qubit_pauli;
        noise.round_dependence = NoiseModel::RoundDependence::schedule;
        noise.schedule[static_cast<std::uint32_t>(text::to_uint(line, line.args[1]))] = parse_rates(line, 2);
    } else if (what == "damping") {
        text::expect_args(line, 2, 2);
        noise.kind = NoiseModel::Kind::damping;
        noise.gamma = text::to_double(line, line.args[1]);
    } else {
        text::bad_line(line, "unknown noise kind '" + what + "'");
    }
}

void parse_on(const text::Line &line, AttackScript &attack) {
    // on <round|*> <vertex|random> <stage> <action...> [when <v> <b>]
    text::expect_args(line, 4, SIZE_MAX);
    auto args = line.args;
    Directive d;
    if (args.size() >= 3 && args[args.size() - 3] == "when") {
        d.when = Condition{static_cast<Vertex>(text::to_uint(line, args[args.size() - 2])),
                           static_cast<Bit>(text::to_uint(line, args.back()))};
        if (d.when->bit > 1) text::bad_line(line, "condition bit must be 0 or 1");
        args.resize(args.size() - 3);
    }
    if (args.size() < 4) text::bad_line(line, "missing action");
    const auto rounds = parse_rounds(line, args[0]);
    if (args[1] != "random") d.vertex = static_cast<Vertex>(text::to_uint(line, args[1]));
    d.stage = parse_stage(line, args[2]);
    const auto &kind = args[3];
    const std::size_t extra = args.size() - 4;
    if (kind == "pauli") {
        if (extra < 1 || extra > 2) text::bad_line(line, "pauli <P> [physical|measurement]");
        Frame frame = d.stage == Stage::before_measure ? Frame::measurement : Frame::physical;
        if (extra == 2) {
            if (args[5] == "physical") frame = Frame::physical;
            else if (args[5] == "measurement") frame = Frame::measurement;
            else text::bad_line(line, "unknown frame '" + args[5] + "'");
        }
        d.action = Action::make_pauli(parse_pauli(line, args[4]), frame);
    } else if (kind == "unitary") {
        if (extra != 8) text::bad_line(line, "unitary takes 8 numbers: re/im of u00 u01 u10 u11");
        sv::Matrix2 u;
        for (int i = 0; i < 4; ++i) {
            u[i] = {text::to_double(line, args[4 + 2 * i]), text::to_double(line, args[5 + 2 * i])};
        }
        if (!sv::is_unitary(u)) text::bad_line(line, "matrix is not unitary within 1e-10");
        d.action = Action::make_unitary(u);
    } else if (kind == "wrong-angle") {
        if (extra != 1) text::bad_line(line, "wrong-angle <k>");
        d.action = Action::make_wrong_angle(static_cast<int>(text::to_int(line, args[4])));
    } else if (kind == "lie") {
        if (extra != 0) text::bad_line(line, "lie takes no arguments");
        d.action = Action::make_lie();
    } else {
        text::bad_line(line, "unknown action '" + kind + "'");
    }
    if (!rounds) {
        attack.every_round.push_back(d);
    } else {
        for (auto j : *rounds) attack.rounds[j].push_back(d);
    }
}

void parse_redo(const text::Line &line, ThreatSpec &spec) {
    // redo server <rounds> [attempts A] [at entangle|last|I]
    // redo client <rounds> [attempts A] [after I]
    text::expect_args(line, 2, 6);
    const bool server = line.args[0] == "server";
    if (!server && line.args[0] != "client") text::bad_line(line, "redo server|client");
    const auto rounds = parse_rounds(line, line.args[1]);
    std::uint32_t attempts = 1;
    ServerRedo sr;
    ClientRedo cr;
    for (std::size_t i = 2; i < line.args.size(); i += 2) {
        if (i + 1 >= line.args.size()) text::bad_line(line, "option '" + line.args[i] + "' needs a value");
        const auto &key = line.args[i];
        const auto &value = line.args[i + 1];
        if (key == "attempts") {
            attempts = static_cast<std::uint32_t>(text::to_uint(line, value));
        } else if (server && key == "at") {
            if (value == "entangle") sr.point = 0;
            else if (value != "last") sr.point = text::to_uint(line, value);
        } else if (!server && key == "after") {
            cr.after_preps = text::to_uint(line, value);
        } else {
            text::bad_line(line, "unknown redo option '" + key + "'");
        }
    }
    if (server) {
        sr.rounds = rounds;
        sr.attempts = attempts;
        spec.server_redo = sr;
    } else {
        cr.rounds = rounds;
        cr.attempts = attempts;
        spec.client_redo = cr;
    }
}

}  // namespace

bool apply_threat_line(const text::Line &line, ThreatSpec &spec) {
    const auto &kw = line.keyword;
    if (kw == "noise") {
        parse_noise(line, spec.noise);
    } else if (kw == "select") {
        text::expect_args(line, 1, 1);
        if (line.args[0] == "fixed") spec.attack.selection = Selection::fixed;
        else if (line.args[0] == "random") spec.attack.selection = Selection::uniformly_random_vertex;
        else text::bad_line(line, "select fixed|random");
    } else if (kw == "attack") {
        text::expect_args(line, 3, 3);
        if (line.args[0] != "em") text::bad_line(line, "only the 'em' attack family is built in");
        ThreatSpec::Em em;
        em.m = static_cast<std::uint32_t>(text::to_uint(line, line.args[1]));
        em.pauli = parse_pauli(line, line.args[2]);
        spec.em = em;
    } else if (kw == "on") {
        parse_on(line, spec.attack);
    } else if (kw == "redo") {
        parse_redo(line, spec);
    } else {
        return false;
    }
    return true;
}

ThreatSpec parse_threat(const std::string &contents) {
    ThreatSpec spec;
    for (const auto &line : text::read_lines(contents, "vbqc-threat", 1)) {
        if (!apply_threat_line(line, spec)) text::bad_line(line, "unknown field");
    }
    spec.noise.validate();
    return spec;
}

ThreatSpec load_threat(const std::string &path) { return parse_threat(text::read_file(path)); }

namespace {

void format_directive(std::ostream &out, const std::string &rounds, const Directive &d) {
    out << "on " << rounds << ' ' << (d.vertex ? std::to_string(*d.vertex) : "random") << ' ' << stage_name(d.stage)
        << ' ';
    switch (d.action.kind) {
        case Action::Kind::pauli:
            out << "pauli " << sv::pauli_char(d.action.pauli) << ' ' << frame_name(d.action.frame);
            break;
        case Action::Kind::unitary:
            out << "unitary";
            for (const auto &z : d.action.unitary) out << ' ' << z.real() << ' ' << z.imag();
            break;
        case Action::Kind::wrong_angle: out << "wrong-angle " << d.action.offset; break;
        case Action::Kind::lie: out << "lie"; break;
    }
    if (d.when) out << " when " << d.when->vertex << ' ' << int(d.when->bit);
    out << '\n';
}

void format_rates(std::ostream &out, const PauliRates &r) { out << r.px << ' ' << r.py << ' ' << r.pz; }

}  // namespace

std::string format_threat(const ThreatSpec &spec) {
    std::ostringstream out;
    out.precision(17);
    out << "vbqc-threat 1\n";
    const auto &n = spec.noise;
    switch (n.kind) {
        case NoiseModel::Kind::none: out << "noise none\n"; break;
        case NoiseModel::Kind::damping: out << "noise damping " << n.gamma << '\n'; break;
        case NoiseModel::Kind::per_qubit_pauli:
        case NoiseModel::Kind::per_round_channel:
            out << "noise pauli ";
            format_rates(out, n.rates);
            out << '\n';
            for (const auto &[v, r] : n.per_vertex) {
                out << "noise vertex " << v << ' ';
                format_rates(out, r);
                out << '\n';
            }
            break;
    }
    for (const auto &[j, r] : n.schedule) {
        out << "noise round " << j << ' ';
        format_rates(out, r);
        out << '\n';
    }
    out << "select " << (spec.attack.selection == Selection::fixed ? "fixed" : "random") << '\n';
    if (spec.em) out << "attack em " << spec.em->m << ' ' << sv::pauli_char(spec.em->pauli) << '\n';
    for (const auto &d : spec.attack.every_round) format_directive(out, "*", d);
    for (const auto &[j, ds] : spec.attack.rounds) {
        for (const auto &d : ds) format_directive(out, std::to_string(j), d);
    }
    if (const auto &r = spec.server_redo) {
        out << "redo server " << format_rounds(r->rounds) << " attempts " << r->attempts << " at "
            << (r->point ? (*r->point == 0 ? std::string("entangle") : std::to_string(*r->point)) : "last") << '\n';
    }
    if (const auto &r = spec.client_redo) {
        out << "redo client " << format_rounds(r->rounds) << " attempts " << r->attempts << " after "
            << r->after_preps << '\n';
    }
    return out.str();
}

}  // namespace vbqc::threat
