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

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "angle.hpp"
#include "statevector.hpp"

namespace vbqc::wire {

// Frame layout, all integers big-endian:
//   u32 length | u8 tag | fields...
// `length` counts the tag and the fields. Field widths: round j and vertex
// are u32, delta/bit/prep kind/prep value are u8.

struct PrepQubit {
    std::uint32_t round;
    Vertex vertex;
    sv::PrepSpec spec;  // read only by the channel simulator, never by server logic
    friend bool operator==(const PrepQubit &, const PrepQubit &) = default;
};
struct EntangleDone {
    std::uint32_t round;
    friend bool operator==(const EntangleDone &, const EntangleDone &) = default;
};
struct MeasureInstruction {
    std::uint32_t round;
    Vertex vertex;
    Angle delta;
    friend bool operator==(const MeasureInstruction &, const MeasureInstruction &) = default;
};
struct Outcome {
    std::uint32_t round;
    Vertex vertex;
    Bit bit;
    friend bool operator==(const Outcome &, const Outcome &) = default;
};
struct Redo {
    std::uint32_t round;
    friend bool operator==(const Redo &, const Redo &) = default;
};
struct Ok {
    friend bool operator==(const Ok &, const Ok &) = default;
};
struct Abort {
    friend bool operator==(const Abort &, const Abort &) = default;
};

using Message = std::variant<PrepQubit, EntangleDone, MeasureInstruction, Outcome, Redo, Ok, Abort>;

enum class Tag : std::uint8_t {
    prep_qubit = 1,
    entangle_done = 2,
    measure_instruction = 3,
    outcome = 4,
    redo = 5,
    ok = 6,
    abort = 7,
};

Tag tag_of(const Message &m);
const char *tag_name(Tag tag);
std::string describe(const Message &m);

using Bytes = std::vector<std::uint8_t>;

Bytes encode(const Message &m);
/// Appends the frame for `m` to `out`.
void encode_into(const Message &m, Bytes &out);
/// Strict inverse of encode: exactly one frame, no trailing bytes. Throws
/// Error(framing) on truncation or length mismatch, Error(version) on an
/// unknown tag.
Message decode(std::span<const std::uint8_t> frame);
/// Total size of the frame starting at `data` if its header is complete.
std::size_t frame_size(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(const std::string &hex);  // throws Error(parse)

enum class Direction : std::uint8_t { client_to_server, server_to_client };

/// Ordered record of every frame crossing the transport.
struct WireLog {
    struct Entry {
        Direction direction;
        Bytes frame;
    };
    std::vector<Entry> entries;

    void record(Direction d, Bytes frame) { entries.push_back({d, std::move(frame)}); }
    /// One "c2s <hex>" / "s2c <hex>" line per frame.
    std::string to_text() const;
    static WireLog from_text(const std::string &text);  // throws Error(parse)
};

}  // namespace vbqc::wire
