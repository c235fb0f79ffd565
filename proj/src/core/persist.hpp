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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "params.hpp"
#include "pattern.hpp"
#include "rounds.hpp"
#include "wire.hpp"

namespace vbqc::rounds {

inline constexpr int kTranscriptSchema = 1;

/// Canonical compact JSON of a verdict; replay compares these bytes.
std::string verdict_json(const Verdict &verdict);

/// Client view: header (params, pattern, input), one line per round with
/// secrets, deltas, outcomes and archived attempts, then the verdict.
std::string client_view_jsonl(const ProtocolRun &run, const ProtocolParams &params,
                              const pattern::MeasurementPattern &pattern, std::span<const Bit> input_bits);

struct ClientView {
    ProtocolParams params;
    pattern::MeasurementPattern pattern;
    std::vector<Bit> input_bits;
    std::vector<RoundTranscript> transcripts;
    std::string verdict;  // recorded verdict_json
};

/// Throws Error(parse) on malformed content, Error(version) on another schema.
ClientView parse_client_view(const std::string &text);

struct ReplayResult {
    std::string server_view;       // rebuilt from the wire log
    std::string verdict;           // recomputed
    std::string recorded_verdict;  // from the client view
    bool verdict_matches = false;
    std::optional<bool> server_view_matches;  // when a recorded server view is given
    bool ok() const { return verdict_matches && server_view_matches.value_or(true); }
};

/// Rebuilds the server view from the frames alone, then re-runs verification
/// on the client's secrets combined with the outcomes found in the log.
ReplayResult replay(const std::string &wire_log_text, const std::string &client_view_text,
                    const std::optional<std::string> &recorded_server_view = std::nullopt);

}  // namespace vbqc::rounds
