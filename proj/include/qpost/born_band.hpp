// Copyright 2026 The qpost Authors
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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpost {

struct BornParams {
    double p = 0.5;
    double epsilon = 0.1;
    std::int64_t n = 1;

    void validate() const {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1], got " + std::to_string(p));
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1), got " + std::to_string(epsilon));
        if (n < 1) throw std::invalid_argument("N must be positive");
    }
};

/// Split of m = 0..N into the deviation tails m ≤ N(p−ε), m ≥ N(p+ε) and the
/// band |m/N − p| < ε between them. Boundary values belong to the tails.
struct BornBand {
    std::int64_t lower_max;  ///< largest m in the lower tail, −1 if empty
    std::int64_t upper_min;  ///< smallest m in the upper tail, N+1 if empty

    bool in_tail(std::int64_t m) const { return m <= lower_max || m >= upper_min; }
};

namespace detail {

/// x snapped to the nearest integer when it is one up to rounding noise.
inline double snap_integer(double x) {
    const double r = std::round(x);
    return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

}  // namespace detail

inline BornBand born_band(const BornParams& params) {
    params.validate();
    const auto n = static_cast<double>(params.n);
    const double lo = detail::snap_integer(n * (params.p - params.epsilon));
    const double hi = detail::snap_integer(n * (params.p + params.epsilon));
    BornBand band{};
    band.lower_max = lo < 0.0 ? -1 : static_cast<std::int64_t>(std::floor(lo));
    band.upper_min = hi > n ? params.n + 1 : static_cast<std::int64_t>(std::ceil(hi));
    band.lower_max = std::min(band.lower_max, params.n);
    band.upper_min = std::max<std::int64_t>(band.upper_min, 0);
    return band;
}

}  // namespace qpost
