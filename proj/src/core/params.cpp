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

#include "params.hpp"

#include <sstream>

#include "error.hpp"

namespace vbqc {

double noise_ceiling(double p) { return (2 * p - 1) / (2 * p - 2); }

void ProtocolParams::validate() const {
    if (d < 1) fail(ErrorCode::input, "need at least one computation round (d >= 1)");
    if (t < 1) fail(ErrorCode::input, "need at least one test round (t >= 1)");
    if (w > t) fail(ErrorCode::input, "threshold w=" + std::to_string(w) + " exceeds t=" + std::to_string(t));
    if (k < 1) fail(ErrorCode::input, "need at least one colour class");
    if (!(p >= 0 && p < 0.5)) fail(ErrorCode::input, "inherent error p must lie in [0, 1/2)");
    if (!(p_min >= 0 && p_min <= p_max && p_max <= 1)) {
        fail(ErrorCode::input, "noise range needs 0 <= p_min <= p_max <= 1");
    }
}

bool ProtocolParams::in_guarantee_region() const {
    const double om = omega();
    return om > 0 && om < noise_ceiling(p) / k;
}

std::string ProtocolParams::describe() const {
    std::ostringstream out;
    out << "n=" << n() << " d=" << d << " t=" << t << " w=" << w << " k=" << k << " p=" << p;
    return out.str();
}

}  // namespace vbqc
