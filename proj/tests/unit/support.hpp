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

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "error.hpp"
#include "rng.hpp"
#include "wire.hpp"

namespace vbqc::test {

/// Code of the vbqc::Error thrown by `f`, or nullopt if it returns.
inline std::optional<ErrorCode> error_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    return std::nullopt;
}

/// Upper-tail p-value of Pearson's statistic against a uniform distribution.
inline double uniform_p_value(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / counts.size();
    double stat = 0;
    for (auto c : counts) stat += (c - expected) * (c - expected) / expected;
    boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

/// |observed - p n| within `sigmas` binomial standard deviations.
inline bool within_sigma(std::uint64_t observed, std::uint64_t n, double p, double sigmas = 5) {
    const double sd = std::sqrt(n * p * (1 - p));
    return std::abs(static_cast<double>(observed) - p * n) <= sigmas * sd;
}

/// Any valid message with uniformly drawn fields.
inline wire::Message random_message(Rng &rng) {
    const auto round = static_cast<std::uint32_t>(rng());
    const auto vertex = static_cast<Vertex>(rng());
    switch (rng.below(7)) {
        case 0: {
            const auto spec = rng.bit() ? sv::PrepSpec::plus(rng.angle()) : sv::PrepSpec::dummy(rng.bit());
            return wire::PrepQubit{round, vertex, spec};
        }
        case 1: return wire::EntangleDone{round};
        case 2: return wire::MeasureInstruction{round, vertex, rng.angle()};
        case 3: return wire::Outcome{round, vertex, rng.bit()};
        case 4: return wire::Redo{round};
        case 5: return wire::Ok{};
        default: return wire::Abort{};
    }
}

}  // namespace vbqc::test
