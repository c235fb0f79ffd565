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
#include <numbers>
#include <ostream>

namespace vbqc {

using Vertex = std::uint32_t;
using Bit = std::uint8_t;

/// A multiple of pi/4, stored as k in 0..7. All protocol angle arithmetic
/// (phi, theta, delta) happens here; radians only appear at the simulator.
class Angle {
public:
    constexpr Angle() = default;
    constexpr explicit Angle(int k) : k_(static_cast<std::uint8_t>(((k % 8) + 8) % 8)) {}

    static constexpr Angle zero() { return Angle(0); }
    static constexpr Angle pi() { return Angle(4); }

    constexpr std::uint8_t k() const { return k_; }
    double radians() const { return k_ * std::numbers::pi / 4.0; }

    constexpr Angle operator+(Angle o) const { return Angle(k_ + o.k_); }
    constexpr Angle operator-(Angle o) const { return Angle(k_ - o.k_); }
    constexpr Angle operator-() const { return Angle(-static_cast<int>(k_)); }
    constexpr Angle &operator+=(Angle o) { return *this = *this + o; }

    /// Adds pi when `b` is set.
    constexpr Angle plus_pi_if(Bit b) const { return b ? *this + pi() : *this; }
    /// Negates when `b` is set.
    constexpr Angle negate_if(Bit b) const { return b ? -*this : *this; }

    friend constexpr bool operator==(Angle, Angle) = default;

private:
    std::uint8_t k_ = 0;
};

inline std::ostream &operator<<(std::ostream &out, Angle a) {
    return out << static_cast<int>(a.k()) << "pi/4";
}

}  // namespace vbqc
