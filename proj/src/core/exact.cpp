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

#include "exact.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace vbqc::exact {

double QSqrt2::value() const { return a.convert_to<double>() + b.convert_to<double>() * std::sqrt(2.0); }

int QSqrt2::sign() const {
    const int sa = a.sign(), sb = b.sign();
    if (sa >= 0 && sb >= 0) return (sa || sb) ? 1 : 0;
    if (sa <= 0 && sb <= 0) return -1;
    const Rational lhs = a * a, rhs = 2 * b * b;
    if (lhs == rhs) return 0;
    return sa > 0 ? (lhs > rhs ? 1 : -1) : (rhs > lhs ? 1 : -1);
}

std::string QSqrt2::str() const {
    std::ostringstream out;
    out << a;
    if (b != 0) out << (b > 0 ? " + " : " - ") << (b > 0 ? b : Rational(-b)) << "*sqrt2";
    return out.str();
}

ZZeta ZZeta::zeta(int k) {
    k = ((k % 8) + 8) % 8;
    ZZeta z;
    if (k < 4) z.c_[k] = 1;
    else z.c_[k - 4] = -1;
    return z;
}

ZZeta ZZeta::operator+(const ZZeta &o) const {
    ZZeta r;
    for (int i = 0; i < 4; ++i) r.c_[i] = c_[i] + o.c_[i];
    return r;
}

ZZeta ZZeta::operator-(const ZZeta &o) const {
    ZZeta r;
    for (int i = 0; i < 4; ++i) r.c_[i] = c_[i] - o.c_[i];
    return r;
}

ZZeta ZZeta::operator*(const ZZeta &o) const {
    ZZeta r;
    for (int i = 0; i < 4; ++i) {
        if (!c_[i]) continue;
        for (int j = 0; j < 4; ++j) {
            const std::int64_t x = c_[i] * o.c_[j];
            if (i + j < 4) r.c_[i + j] += x;
            else r.c_[i + j - 4] -= x;
        }
    }
    return r;
}

ZZeta ZZeta::conj() const {
    ZZeta r;
    r.c_[0] = c_[0];
    for (int j = 1; j < 4; ++j) r.c_[4 - j] -= c_[j];
    return r;
}

std::array<std::int64_t, 2> ZZeta::norm2() const {
    const ZZeta p = *this * conj();
    if (p.c_[2] != 0 || p.c_[3] != -p.c_[1]) fail(ErrorCode::domain, "|z|^2 left the real subfield");
    return {p.c_[0], p.c_[1]};  // zeta - zeta^3 = sqrt(2)
}

Matrix pauli(sv::Pauli p) {
    switch (p) {
        case sv::Pauli::I: return {1, 0, 0, 1};
        case sv::Pauli::X: return {0, 1, 1, 0};
        case sv::Pauli::Y: return {0, -ZZeta::zeta(2), ZZeta::zeta(2), 0};
        case sv::Pauli::Z: return {1, 0, 0, -1};
    }
    return {1, 0, 0, 1};
}

Matrix pauli_in_measurement_frame(sv::Pauli p, Angle delta) {
    const int k = delta.k();
    switch (p) {
        case sv::Pauli::I: return {1, 0, 0, 1};
        case sv::Pauli::X: return {1, 0, 0, -1};
        case sv::Pauli::Y: return {0, ZZeta::zeta(2 - k), -ZZeta::zeta(2 + k), 0};
        case sv::Pauli::Z: return {0, ZZeta::zeta(-k), ZZeta::zeta(k), 0};
    }
    return {1, 0, 0, 1};
}

ExactState::ExactState(std::span<const sv::PrepSpec> specs) : qubits_(specs.size()) {
    if (qubits_ > 16) fail(ErrorCode::capacity, "exact state holds at most 16 qubits");
    amps_.assign(std::size_t{1} << qubits_, ZZeta(1));
    for (std::size_t v = 0; v < qubits_; ++v) {
        const auto &s = specs[v];
        const std::size_t bit = std::size_t{1} << v;
        ZZeta a0 = 1, a1 = 0;
        if (s.kind == sv::PrepSpec::Kind::plus_theta) {
            a1 = ZZeta::zeta(s.value);
            ++plus_;
        } else if (s.value) {
            a0 = 0;
            a1 = 1;
        }
        for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] = amps_[i] * ((i & bit) ? a1 : a0);
    }
}

void ExactState::cz(Vertex a, Vertex b) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == mask) amps_[i] = -amps_[i];
    }
}

void ExactState::apply(Vertex v, const Matrix &m) {
    const std::size_t bit = std::size_t{1} << v;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        const ZZeta a0 = amps_[i], a1 = amps_[i | bit];
        amps_[i] = m[0] * a0 + m[1] * a1;
        amps_[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

void ExactState::project(Vertex v, Angle delta, Bit outcome) {
    const std::size_t bit = std::size_t{1} << v;
    ZZeta coeff = ZZeta::zeta(-static_cast<int>(delta.k()));
    if (outcome) coeff = -coeff;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        amps_[i] = amps_[i] + coeff * amps_[i | bit];
        amps_[i | bit] = 0;
    }
    ++measured_;
}

std::array<std::int64_t, 2> ExactState::norm2() const {
    std::array<std::int64_t, 2> s{0, 0};
    for (const auto &a : amps_) {
        if (a.is_zero()) continue;
        const auto n = a.norm2();
        s[0] += n[0];
        s[1] += n[1];
    }
    return s;
}

QSqrt2 ExactState::probability() const {
    const auto n = norm2();
    const Rational scale(1, boost::multiprecision::cpp_int(1) << (plus_ + measured_));
    return {Rational(n[0]) * scale, Rational(n[1]) * scale};
}

QSqrt2 ExactDistribution::total() const {
    QSqrt2 s;
    for (const auto &[k, p] : points) s += p;
    return s;
}

std::map<std::vector<std::uint8_t>, QSqrt2> ExactDistribution::delta_marginal() const {
    std::map<std::vector<std::uint8_t>, QSqrt2> m;
    for (const auto &[k, p] : points) m[k.deltas] += p;
    return m;
}

QSqrt2 ExactDistribution::fail_probability() const {
    QSqrt2 s;
    for (const auto &[k, p] : points) {
        if (k.passed == false) s += p;
    }
    return s;
}

std::map<std::uint64_t, QSqrt2> ExactDistribution::output_marginal() const {
    std::map<std::uint64_t, QSqrt2> m;
    for (const auto &[k, p] : points) {
        if (k.output) m[*k.output] += p;
    }
    return m;
}

QSqrt2 tv_distance(const std::map<std::vector<std::uint8_t>, QSqrt2> &x,
                   const std::map<std::vector<std::uint8_t>, QSqrt2> &y) {
    std::map<std::vector<std::uint8_t>, QSqrt2> diff = x;
    for (const auto &[k, p] : y) diff[k] = diff[k] - p;
    QSqrt2 s;
    for (const auto &[k, d] : diff) s += d.abs();
    return s * Rational(1, 2);
}

namespace {

using ubqc::RoundKind;

struct Choice {
    std::vector<Vertex> traps, dummies;
};

std::vector<Choice> choices(const EnumerationRequest &req) {
    const auto &p = *req.pattern;
    const std::size_t n = p.vertex_count();
    if (req.kind == RoundKind::computation) {
        Choice c;
        for (Vertex v = 0; v < n; ++v) c.traps.push_back(v);
        return {c};
    }
    std::vector<std::size_t> colours;
    if (req.trap_colour) {
        if (*req.trap_colour >= p.colour_count()) fail(ErrorCode::input, "trap colour out of range");
        colours.push_back(*req.trap_colour);
    } else {
        for (std::size_t c = 0; c < p.colour_count(); ++c) colours.push_back(c);
    }
    std::vector<Choice> out;
    const auto cls = p.coloring.class_of(n);
    for (auto c : colours) {
        Choice ch;
        for (Vertex v = 0; v < n; ++v) (cls[v] == c ? ch.traps : ch.dummies).push_back(v);
        out.push_back(ch);
    }
    return out;
}

/// Each trap or computation vertex: 8 thetas x 2 rs; each dummy: 2 d x 8 deltas.
std::uint64_t secrets_per_choice(std::size_t vertex_count) {
    if (vertex_count > 15) return UINT64_MAX;
    return std::uint64_t{1} << (4 * vertex_count);
}

class Enumerator {
public:
    Enumerator(const EnumerationRequest &req, ExactDistribution &out) : req_(req), p_(*req.pattern), out_(out) {}

    void run() {
        const auto all = choices(req_);
        const std::size_t n = p_.vertex_count();
        const Rational weight(1, boost::multiprecision::cpp_int(all.size()) * secrets_per_choice(n));
        for (const auto &choice : all) {
            const std::uint64_t configs = secrets_per_choice(n);
            for (std::uint64_t code = 0; code < configs; ++code) {
                setup(choice, code);
                leaf_weight_ = weight;
                ExactState state(specs_);
                stage(state, threat::Stage::after_prep);
                for (auto [a, b] : p_.graph.edges()) state.cz(a, b);
                stage(state, threat::Stage::after_entangle);
                measure(state, 0);
            }
        }
    }

private:
    void setup(const Choice &choice, std::uint64_t code) {
        const std::size_t n = p_.vertex_count();
        auto &s = secrets_;
        s = {};
        s.kind = req_.kind;
        s.thetas.assign(n, std::nullopt);
        s.rs.assign(n, std::nullopt);
        s.dummies.assign(n, std::nullopt);
        s.input_bits = req_.input_bits;
        dummy_delta_.assign(n, Angle{});
        if (req_.kind == RoundKind::test) {
            const auto cls = p_.coloring.class_of(n);
            if (!choice.traps.empty()) s.trap_color = cls[choice.traps.front()];
        }
        for (Vertex v : choice.traps) {
            s.thetas[v] = Angle(static_cast<int>(code & 7));
            s.rs[v] = static_cast<Bit>((code >> 3) & 1);
            code >>= 4;
        }
        for (Vertex v : choice.dummies) {
            s.dummies[v] = static_cast<Bit>(code & 1);
            dummy_delta_[v] = Angle(static_cast<int>((code >> 1) & 7));
            code >>= 4;
        }
        specs_.clear();
        for (Vertex v = 0; v < n; ++v) specs_.push_back(s.prep_spec(v));
        reported_.assign(n, std::nullopt);
        decoded_.assign(n, std::nullopt);
        deltas_.assign(n, 0);
    }

    bool fires(const threat::Directive &d) const {
        return !d.when || reported_.at(d.when->vertex) == std::optional<Bit>(d.when->bit);
    }

    void apply_action(ExactState &state, const threat::Directive &d, std::optional<Angle> delta) const {
        using K = threat::Action::Kind;
        if (d.action.kind == K::pauli) {
            if (d.action.frame == threat::Frame::measurement) {
                state.apply(*d.vertex, pauli_in_measurement_frame(d.action.pauli, *delta));
            } else {
                state.apply(*d.vertex, pauli(d.action.pauli));
            }
        }
    }

    void stage(ExactState &state, threat::Stage s) const {
        for (const auto &d : req_.deviation) {
            if (d.stage == s && fires(d)) apply_action(state, d, std::nullopt);
        }
    }

    void measure(const ExactState &state, std::size_t pos) {
        const std::size_t n = p_.vertex_count();
        if (pos == n) {
            leaf(state);
            return;
        }
        const Vertex v = p_.graph.ordering()[pos];
        Angle delta;
        if (req_.kind == RoundKind::computation) delta = ubqc::delta_computation(v, secrets_, p_, decoded_);
        else if (secrets_.is_trap(v)) delta = secrets_.thetas[v]->plus_pi_if(*secrets_.rs[v]);
        else delta = dummy_delta_[v];

        ExactState here = state;
        int offset = 0;
        bool lie = false;
        for (const auto &d : req_.deviation) {
            if (d.stage != threat::Stage::before_measure || *d.vertex != v || !fires(d)) continue;
            apply_action(here, d, delta);
            if (d.action.kind == threat::Action::Kind::wrong_angle) offset += d.action.offset;
            if (d.action.kind == threat::Action::Kind::lie) lie = !lie;
        }
        for (Bit b : {Bit{0}, Bit{1}}) {
            ExactState next = here;
            next.project(v, delta + Angle(offset), b);
            if (next.norm2() == std::array<std::int64_t, 2>{0, 0}) continue;
            const Bit reported = lie ? b ^ 1 : b;
            reported_[v] = reported;
            deltas_[v] = delta.k();
            if (secrets_.rs[v]) decoded_[v] = reported ^ *secrets_.rs[v];
            measure(next, pos + 1);
            reported_[v].reset();
            decoded_[v].reset();
        }
    }

    void leaf(const ExactState &state) {
        const std::size_t n = p_.vertex_count();
        ExactKey key;
        key.deltas = deltas_;
        for (Vertex v = 0; v < n; ++v) key.outcomes.push_back(*reported_[v]);
        if (req_.kind == RoundKind::test) {
            bool ok = true;
            for (Vertex v = 0; v < n; ++v) {
                if (secrets_.is_trap(v) && *reported_[v] != ubqc::trap_expected(v, secrets_, p_.graph)) ok = false;
            }
            key.passed = ok;
        } else {
            key.output = ubqc::pack_output(p_, decoded_);
        }
        out_.points[key] += state.probability() * leaf_weight_;
        ++out_.leaves;
    }

    const EnumerationRequest &req_;
    const pattern::MeasurementPattern &p_;
    ExactDistribution &out_;
    ubqc::RoundSecrets secrets_;
    std::vector<sv::PrepSpec> specs_;
    std::vector<Angle> dummy_delta_;
    std::vector<std::optional<Bit>> reported_, decoded_;
    std::vector<std::uint8_t> deltas_;
    Rational leaf_weight_;
};

}  // namespace

std::uint64_t enumeration_space(const EnumerationRequest &request) {
    if (!request.pattern) fail(ErrorCode::input, "enumeration needs a pattern");
    const std::size_t n = request.pattern->vertex_count();
    if (n > 5) return UINT64_MAX;  // 2^(5n) already exceeds the cap
    const std::uint64_t per = secrets_per_choice(n) << n;
    const std::uint64_t colours =
        request.kind == RoundKind::test && !request.trap_colour ? request.pattern->colour_count() : 1;
    return per * colours;
}

ExactDistribution enumerate_exact(const EnumerationRequest &request) {
    const auto space = enumeration_space(request);
    if (space > kMaxEnumeration) {
        fail(ErrorCode::capacity, "enumeration space " + (space == UINT64_MAX ? std::string("> 2^64") : std::to_string(space)) +
                                      " exceeds 2^24");
    }
    const auto &p = *request.pattern;
    if (request.input_bits.size() != p.inputs.size()) {
        fail(ErrorCode::input, "pattern has " + std::to_string(p.inputs.size()) + " inputs, got " +
                                   std::to_string(request.input_bits.size()) + " bits");
    }
    for (const auto &d : request.deviation) {
        if (!d.vertex) fail(ErrorCode::script, "exact enumeration needs directives with fixed vertices");
        if (*d.vertex >= p.vertex_count()) fail(ErrorCode::script, "directive names vertex " + std::to_string(*d.vertex));
        if (d.action.kind == threat::Action::Kind::unitary) {
            fail(ErrorCode::unsupported_model, "exact enumeration supports Pauli, wrong-angle and lie deviations only");
        }
        if (d.action.frame == threat::Frame::measurement && d.stage != threat::Stage::before_measure) {
            fail(ErrorCode::script, "measurement-frame Pauli outside before-measure");
        }
        if (d.when && d.when->vertex >= p.vertex_count()) fail(ErrorCode::script, "condition names an unknown vertex");
    }
    ExactDistribution out;
    Enumerator(request, out).run();
    return out;
}

}  // namespace vbqc::exact
