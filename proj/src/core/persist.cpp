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

#include "persist.hpp"

#include <sstream>

#include "error.hpp"
#include "json.hpp"
#include "server.hpp"

namespace vbqc::rounds {

using nlohmann::json;

namespace {

template <typename T, typename F>
json optional_array(const std::vector<std::optional<T>> &xs, F &&value) {
    json out = json::array();
    for (const auto &x : xs) out.push_back(x ? json(value(*x)) : json(nullptr));
    return out;
}

template <typename T, typename F>
std::vector<std::optional<T>> read_optional_array(const json &j, F &&convert) {
    std::vector<std::optional<T>> out;
    for (const auto &x : j) out.push_back(x.is_null() ? std::nullopt : std::optional<T>(convert(x)));
    return out;
}

json verdict_object(const Verdict &v) {
    json tallies = json::object();
    for (const auto &[y, c] : v.tallies) tallies[std::to_string(y)] = c;
    return {{"status", v.ok() ? "ok" : "abort"},
            {"reason", reason_name(v.reason)},
            {"output", v.ok() ? json(v.output) : json(nullptr)},
            {"c_fail", v.c_fail},
            {"tallies", tallies}};
}

json attempt_object(const Attempt &a) {
    const auto &s = a.plan.secrets;
    auto angle_k = [](Angle x) { return static_cast<int>(x.k()); };
    auto bit = [](Bit b) { return static_cast<int>(b); };
    return {{"attempt", a.plan.attempt},
            {"kind", ubqc::round_kind_name(a.plan.kind)},
            {"trap_colour", s.trap_color ? json(*s.trap_color) : json(nullptr)},
            {"thetas", optional_array(s.thetas, angle_k)},
            {"rs", optional_array(s.rs, bit)},
            {"dummies", optional_array(s.dummies, bit)},
            {"input", s.input_bits},
            {"deltas", optional_array(a.deltas, angle_k)},
            {"outcomes", optional_array(a.outcomes, bit)},
            {"preps", a.preps_sent},
            {"redo_by", a.redo_by ? json(*a.redo_by == Requester::client ? "client" : "server") : json(nullptr)}};
}

Attempt read_attempt(const json &j, std::uint32_t round) {
    Attempt a;
    a.plan.index = round;
    a.plan.attempt = j.at("attempt").get<std::uint32_t>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "test" && kind != "computation") fail(ErrorCode::parse, "unknown round kind '" + kind + "'");
    a.plan.kind = kind == "test" ? RoundKind::test : RoundKind::computation;
    auto &s = a.plan.secrets;
    s.kind = a.plan.kind;
    if (!j.at("trap_colour").is_null()) s.trap_color = j.at("trap_colour").get<std::size_t>();
    auto to_angle = [](const json &x) { return Angle(x.get<int>()); };
    auto to_bit = [](const json &x) { return static_cast<Bit>(x.get<int>()); };
    s.thetas = read_optional_array<Angle>(j.at("thetas"), to_angle);
    s.rs = read_optional_array<Bit>(j.at("rs"), to_bit);
    s.dummies = read_optional_array<Bit>(j.at("dummies"), to_bit);
    s.input_bits = j.at("input").get<std::vector<Bit>>();
    a.deltas = read_optional_array<Angle>(j.at("deltas"), to_angle);
    a.outcomes = read_optional_array<Bit>(j.at("outcomes"), to_bit);
    a.preps_sent = j.at("preps").get<std::size_t>();
    if (!j.at("redo_by").is_null()) {
        a.redo_by = j.at("redo_by").get<std::string>() == "client" ? Requester::client : Requester::server;
    }
    return a;
}

std::vector<json> read_jsonl(const std::string &text) {
    std::vector<json> lines;
    std::istringstream in(text);
    std::size_t number = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++number;
        if (raw.empty()) continue;
        try {
            lines.push_back(json::parse(raw));
        } catch (const json::exception &e) {
            fail(ErrorCode::parse, "line " + std::to_string(number) + ": " + e.what());
        }
    }
    return lines;
}

}  // namespace

std::string verdict_json(const Verdict &verdict) { return verdict_object(verdict).dump(); }

std::string client_view_jsonl(const ProtocolRun &run, const ProtocolParams &params,
                              const pattern::MeasurementPattern &pattern, std::span<const Bit> input_bits) {
    json header = {{"schema", kTranscriptSchema},
                   {"view", "client"},
                   {"params",
                    {{"d", params.d},
                     {"t", params.t},
                     {"w", params.w},
                     {"k", params.k},
                     {"p", params.p},
                     {"p_min", params.p_min},
                     {"p_max", params.p_max}}},
                   {"input", std::vector<Bit>(input_bits.begin(), input_bits.end())},
                   {"pattern", pattern::format_pattern(pattern)}};
    std::string out = header.dump() + "\n";
    for (const auto &t : run.transcripts) {
        json line = attempt_object(t);
        line["round"] = t.plan.index;
        line["redo_count"] = t.redo_count;
        line["output_flip"] = t.output_flip;
        line["output"] = t.output ? json(*t.output) : json(nullptr);
        line["passed"] = t.passed ? json(*t.passed) : json(nullptr);
        json archived = json::array();
        for (const auto &a : t.archived) archived.push_back(attempt_object(a));
        line["archived"] = archived;
        out += line.dump() + "\n";
    }
    out += json{{"verdict", verdict_object(run.verdict)}}.dump() + "\n";
    return out;
}

ClientView parse_client_view(const std::string &text) {
    const auto lines = read_jsonl(text);
    if (lines.size() < 2) fail(ErrorCode::parse, "client view needs a header and a verdict line");
    ClientView view;
    try {
        const auto &h = lines.front();
        if (h.value("view", "") != "client") fail(ErrorCode::parse, "not a client view");
        if (h.at("schema").get<int>() != kTranscriptSchema) {
            fail(ErrorCode::version, "transcript schema " + h.at("schema").dump() + " is not supported");
        }
        const auto &p = h.at("params");
        view.params.d = p.at("d").get<std::uint32_t>();
        view.params.t = p.at("t").get<std::uint32_t>();
        view.params.w = p.at("w").get<std::uint32_t>();
        view.params.k = p.at("k").get<std::uint32_t>();
        view.params.p = p.at("p").get<double>();
        view.params.p_min = p.at("p_min").get<double>();
        view.params.p_max = p.at("p_max").get<double>();
        view.params.validate();
        view.input_bits = h.at("input").get<std::vector<Bit>>();
        view.pattern = pattern::parse_pattern(h.at("pattern").get<std::string>());
        for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
            const auto &l = lines[i];
            const auto round = l.at("round").get<std::uint32_t>();
            RoundTranscript t;
            static_cast<Attempt &>(t) = read_attempt(l, round);
            t.redo_count = l.at("redo_count").get<std::uint32_t>();
            t.output_flip = l.at("output_flip").get<Bit>();
            if (!l.at("output").is_null()) t.output = l.at("output").get<std::uint64_t>();
            if (!l.at("passed").is_null()) t.passed = l.at("passed").get<bool>();
            for (const auto &a : l.at("archived")) t.archived.push_back(read_attempt(a, round));
            view.transcripts.push_back(std::move(t));
        }
        view.verdict = lines.back().at("verdict").dump();
    } catch (const json::exception &e) {
        fail(ErrorCode::parse, std::string("client view: ") + e.what());
    }
    return view;
}

ReplayResult replay(const std::string &wire_log_text, const std::string &client_view_text,
                    const std::optional<std::string> &recorded_server_view) {
    const auto log = wire::WireLog::from_text(wire_log_text);
    const auto server = ServerView::from_log(log);
    auto client = parse_client_view(client_view_text);

    ReplayResult result;
    result.server_view = server.to_jsonl();
    if (recorded_server_view) result.server_view_matches = *recorded_server_view == result.server_view;

    std::map<std::uint32_t, const ServerView::RoundRecord *> by_round;
    for (const auto &r : server.rounds()) by_round[r.round] = &r;
    const std::size_t n = client.pattern.vertex_count();
    for (auto &t : client.transcripts) {
        auto it = by_round.find(t.plan.index);
        if (it == by_round.end()) fail(ErrorCode::input, "round " + std::to_string(t.plan.index) + " missing from log");
        const auto &attempts = it->second->attempts;
        if (attempts.size() != t.redo_count + 1) {
            fail(ErrorCode::input, "round " + std::to_string(t.plan.index) + ": log has " +
                                       std::to_string(attempts.size()) + " attempts, client view " +
                                       std::to_string(t.redo_count + 1));
        }
        const auto &last = attempts.back();
        if (last.end != "complete") fail(ErrorCode::input, "round " + std::to_string(t.plan.index) + " incomplete in log");
        t.outcomes.assign(n, std::nullopt);
        t.deltas.assign(n, std::nullopt);
        for (auto [v, b] : last.outcomes) {
            if (v >= n) fail(ErrorCode::input, "log names vertex " + std::to_string(v));
            t.outcomes[v] = b;
        }
        for (auto [v, k] : last.deltas) {
            if (v < n) t.deltas[v] = Angle(k);
        }
    }
    result.verdict = verdict_json(verify_and_vote(client.transcripts, client.params, client.pattern));
    result.recorded_verdict = client.verdict;
    result.verdict_matches = result.verdict == result.recorded_verdict;
    return result;
}

}  // namespace vbqc::rounds
