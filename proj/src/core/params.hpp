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

namespace vbqc {

/// Round counts and thresholds of one protocol run. n = d + t is derived.
struct ProtocolParams {
    std::uint32_t d = 1;  // computation rounds
    std::uint32_t t = 1;  // test rounds
    std::uint32_t w = 1;  // abort once this many test rounds fail
    std::uint32_t k = 1;  // colour classes
    double p = 0;         // inherent error of the computation
    double p_min = 0;     // per-test-round failure probability range of the device
    double p_max = 0;

    std::uint32_t n() const { return d + t; }
    double delta() const { return static_cast<double>(d) / n(); }
    double tau() const { return static_cast<double>(t) / n(); }
    double omega() const { return static_cast<double>(w) / t; }

    /// Throws Error(input) when the counts or probabilities are out of range.
    void validate() const;
    /// 0 < omega < (1/k)(2p-1)/(2p-2).
    bool in_guarantee_region() const;
    std::string describe() const;
};

/// (2p-1)/(2p-2), the per-round fraction ceiling that recurs in every bound.
double noise_ceiling(double p);

}  // namespace vbqc
