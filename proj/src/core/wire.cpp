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

#include "wire.hpp"

#include <sstream>

#include "error.hpp"
#include "textfile.hpp"

namespace vbqc::wire {

namespace {

void put_u32(Bytes &out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
           std::uint32_t{b[at + 3]};
}

constexpr std::size_t payload_size(Tag tag) {
    switch (tag) {
        case Tag::prep_qubit: return 1 + 4 + 4 + 1 + 1;
        case Tag::entangle_done: return 1 + 4;
        case Tag::measure_instruction: return 1 + 4 + 4 + 1;
        case Tag::outcome: return 1 + 4 + 4 + 1;
        case Tag::redo: return 1 + 4;
        case Tag::ok: return 1;
        case Tag::abort: return 1;
    }
    return 0;
}

Bit checked_bit(std::uint8_t b, const char *what) {
    if (b > 1) fail(ErrorCode::framing, std::string(what) + " must be 0 or 1");
    return b;
}

}  // namespace

Tag tag_of(const Message &m) { return static_cast<Tag>(m.index() + 1); }

const char *tag_name(Tag tag) {
    switch (tag) {
        case Tag::prep_qubit: return "PrepQubit";
        case Tag::entangle_done: return "EntangleDone";
        case Tag::measure_instruction: return "MeasureInstruction";
        case Tag::outcome: return "Outcome";
        case Tag::redo: return "Redo";
        case Tag::ok: return "Ok";
        case Tag::abort: return "Abort";
    }
    return "?";
}

std::string describe(const Message &m) {
    std::ostringstream out;
    out << tag_name(tag_of(m));
    std::visit(
        [&](const auto &msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, PrepQubit>) out << "(j=" << msg.round << ", v=" << msg.vertex << ")";
            if constexpr (std::is_same_v<T, EntangleDone> || std::is_same_v<T, Redo>) out << "(j=" << msg.round << ")";
            if constexpr (std::is_same_v<T, MeasureInstruction>) {
                out << "(j=" << msg.round << ", v=" << msg.vertex << ", k=" << int(msg.delta.k()) << ")";
            }
            if constexpr (std::is_same_v<T, Outcome>) {
                out << "(j=" << msg.round << ", v=" << msg.vertex << ", b=" << int(msg.bit) << ")";
            }
        },
        m);
    return out.str();
}

void encode_into(const Message &m, Bytes &out) {
    const Tag tag = tag_of(m);
    put_u32(out, static_cast<std::uint32_t>(payload_size(tag)));
    out.push_back(static_cast<std::uint8_t>(tag));
    std::visit(
        [&](const auto &msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, PrepQubit>) {
                put_u32(out, msg.round);
                put_u32(out, msg.vertex);
                out.push_back(static_cast<std::uint8_t>(msg.spec.kind));
                out.push_back(msg.spec.value);
            } else if constexpr (std::is_same_v<T, EntangleDone> || std::is_same_v<T, Redo>) {
                put_u32(out, msg.round);
            } else if constexpr (std::is_same_v<T, MeasureInstruction>) {
                put_u32(out, msg.round);
                put_u32(out, msg.vertex);
                out.push_back(msg.delta.k());
            } else if constexpr (std::is_same_v<T, Outcome>) {
                put_u32(out, msg.round);
                put_u32(out, msg.vertex);
                out.push_back(msg.bit);
            }
        },
        m);
}

Bytes encode(const Message &m) {
    Bytes out;
    out.reserve(4 + 11);
    encode_into(m, out);
    return out;
}

std::size_t frame_size(std::span<const std::uint8_t> data) {
    if (data.size() < 4) fail(ErrorCode::framing, "truncated frame header");
    return 4 + static_cast<std::size_t>(get_u32(data, 0));
}

Message decode(std::span<const std::uint8_t> frame) {
    if (frame.size() < 5) fail(ErrorCode::framing, "truncated frame (" + std::to_string(frame.size()) + " bytes)");
    const std::uint32_t length = get_u32(frame, 0);
    const std::uint8_t raw_tag = frame[4];
    if (raw_tag < 1 || raw_tag > 7) fail(ErrorCode::version, "unknown message tag " + std::to_string(raw_tag));
    const Tag tag = static_cast<Tag>(raw_tag);
    if (length != payload_size(tag)) {
        fail(ErrorCode::framing, std::string(tag_name(tag)) + ": bad length " + std::to_string(length));
    }
    if (frame.size() < 4 + length) fail(ErrorCode::framing, "truncated frame body");
    if (frame.size() > 4 + length) fail(ErrorCode::framing, "trailing bytes after frame");
    const auto b = frame;
    switch (tag) {
        case Tag::prep_qubit: {
            const std::uint8_t kind = b[13], value = b[14];
            if (kind > 1) fail(ErrorCode::framing, "unknown prep kind " + std::to_string(kind));
            if (kind == 0 && value > 7) fail(ErrorCode::framing, "prep angle out of range");
            if (kind == 1 && value > 1) fail(ErrorCode::framing, "dummy bit out of range");
            return PrepQubit{get_u32(b, 5), get_u32(b, 9), {static_cast<sv::PrepSpec::Kind>(kind), value}};
        }
        case Tag::entangle_done: return EntangleDone{get_u32(b, 5)};
        case Tag::measure_instruction: {
            if (b[13] > 7) fail(ErrorCode::framing, "delta out of range");
            return MeasureInstruction{get_u32(b, 5), get_u32(b, 9), Angle(b[13])};
        }
        case Tag::outcome: return Outcome{get_u32(b, 5), get_u32(b, 9), checked_bit(b[13], "outcome")};
        case Tag::redo: return Redo{get_u32(b, 5)};
        case Tag::ok: return Ok{};
        case Tag::abort: return Abort{};
    }
    fail(ErrorCode::version, "unknown message tag");
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto c : bytes) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 15]);
    }
    return s;
}

Bytes from_hex(const std::string &hex) {
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        fail(ErrorCode::parse, "bad hex digit '" + std::string(1, c) + "'");
    };
    if (hex.size() % 2) fail(ErrorCode::parse, "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::string WireLog::to_text() const {
    std::string s = "vbqc-wire 1\n";
    for (const auto &e : entries) {
        s += e.direction == Direction::client_to_server ? "c2s " : "s2c ";
        s += to_hex(e.frame);
        s += '\n';
    }
    return s;
}

WireLog WireLog::from_text(const std::string &contents) {
    WireLog log;
    for (const auto &line : text::read_lines(contents, "vbqc-wire", 1)) {
        text::expect_args(line, 1, 1);
        Direction d;
        if (line.keyword == "c2s") d = Direction::client_to_server;
        else if (line.keyword == "s2c") d = Direction::server_to_client;
        else text::bad_line(line, "expected c2s or s2c");
        log.record(d, from_hex(line.args[0]));
    }
    return log;
}

}  // namespace vbqc::wire
