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

#include "textfile.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace vbqc {

const char *error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::input: return "input";
        case ErrorCode::capacity: return "capacity";
        case ErrorCode::protocol_order: return "protocol_order";
        case ErrorCode::domain: return "domain";
        case ErrorCode::infeasible: return "infeasible";
        case ErrorCode::framing: return "framing";
        case ErrorCode::version: return "version";
        case ErrorCode::session: return "session";
        case ErrorCode::script: return "script";
        case ErrorCode::unsupported_model: return "unsupported_model";
        case ErrorCode::io: return "io";
        case ErrorCode::parse: return "parse";
    }
    return "unknown";
}

namespace text {

std::vector<Line> read_lines(const std::string &text, std::string_view magic, int version) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    bool saw_header = false;
    while (std::getline(in, raw)) {
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream words(raw);
        Line line;
        line.number = number;
        if (!(words >> line.keyword)) continue;
        for (std::string w; words >> w;) line.args.push_back(w);
        if (!saw_header) {
            if (line.keyword != magic || line.args.size() != 1) {
                fail(ErrorCode::parse, "line " + std::to_string(number) + ": expected header '" +
                                           std::string(magic) + " <version>'");
            }
            if (to_int(line, line.args[0]) != version) {
                fail(ErrorCode::version, std::string(magic) + ": unsupported version " + line.args[0] +
                                             " (expected " + std::to_string(version) + ")");
            }
            saw_header = true;
            continue;
        }
        lines.push_back(std::move(line));
    }
    if (!saw_header) fail(ErrorCode::parse, "empty file: missing '" + std::string(magic) + "' header");
    return lines;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write " + path);
    out << contents;
    if (!out) fail(ErrorCode::io, "short write to " + path);
}

void bad_line(const Line &line, const std::string &why) {
    fail(ErrorCode::parse, "line " + std::to_string(line.number) + " (" + line.keyword + "): " + why);
}

void expect_args(const Line &line, std::size_t min, std::size_t max) {
    if (line.args.size() < min || line.args.size() > max) {
        bad_line(line, "expected " + std::to_string(min) +
                           (max == min ? "" : ".." + (max == SIZE_MAX ? std::string("n") : std::to_string(max))) +
                           " arguments, got " + std::to_string(line.args.size()));
    }
}

std::int64_t to_int(const Line &line, const std::string &token) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size()) bad_line(line, "not an integer: '" + token + "'");
    return v;
}

std::uint64_t to_uint(const Line &line, const std::string &token) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size()) {
        bad_line(line, "not a non-negative integer: '" + token + "'");
    }
    return v;
}

double to_double(const Line &line, const std::string &token) {
    try {
        std::size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::logic_error &) {
        bad_line(line, "not a number: '" + token + "'");
    }
}

}  // namespace text
}  // namespace vbqc
