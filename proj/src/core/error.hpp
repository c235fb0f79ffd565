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

#include <stdexcept>
#include <string>

namespace vbqc {

/// Failure categories surfaced by the core. The C API maps each one to a
/// stable status code, so the numbering here is part of the ABI.
enum class ErrorCode : int {
    input = 1,
    capacity = 2,
    protocol_order = 3,
    domain = 4,
    infeasible = 5,
    framing = 6,
    version = 7,
    session = 8,
    script = 9,
    unsupported_model = 10,
    io = 11,
    parse = 12,
};

const char *error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &message) {
    throw Error(code, message);
}

}  // namespace vbqc
