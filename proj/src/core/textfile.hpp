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
#include <string>
#include <string_view>
#include <vector>

namespace vbqc::text {

/// One non-blank, comment-stripped line split on whitespace.
struct Line {
    std::size_t number = 0;
    std::string keyword;
    std::vector<std::string> args;
};

/// Splits a versioned text file whose first line is "<magic> <version>".
/// Throws Error(parse) on a wrong magic and Error(version) on an unsupported
/// version.
std::vector<Line> read_lines(const std::string &text, std::string_view magic, int version);

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &contents);

[[noreturn]] void bad_line(const Line &line, const std::string &why);
void expect_args(const Line &line, std::size_t min, std::size_t max);

std::int64_t to_int(const Line &line, const std::string &token);
std::uint64_t to_uint(const Line &line, const std::string &token);
double to_double(const Line &line, const std::string &token);

}  // namespace vbqc::text
