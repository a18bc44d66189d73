// Copyright 2026 The tbcluster Authors
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
#include <cstdlib>
#include <vector>

namespace tbc {

/**
 * Integer-order Bessel functions of the first kind, J_0(x) .. J_max(x).
 *
 * Miller's algorithm: run the three-term recurrence
 *     J_{n-1}(x) = (2n/x) J_n(x) - J_{n+1}(x)
 * downward from an order well above max(max_order, |x|), then fix the scale
 * with the identity J_0 + 2 Σ_k J_{2k} = 1. Negative x uses J_n(-x) = (-1)^n J_n(x).
 */
inline std::vector<double> bessel_j_orders(double x, int max_order) {
    std::vector<double> out(static_cast<std::size_t>(std::max(max_order, 0)) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int top = std::max(max_order, static_cast<int>(ax)) + 2 * static_cast<int>(std::sqrt(40.0 * (std::max(max_order, static_cast<int>(ax)) + 10))) + 20;
    // start even so the normalization sum picks up J_top's parity correctly
    const int start = top + (top % 2);

    std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
    j[static_cast<std::size_t>(start) + 1] = 0.0;
    j[static_cast<std::size_t>(start)] = 1e-300;
    double norm = 0.0;
    for (int n = start; n >= 1; --n) {
        j[static_cast<std::size_t>(n) - 1] = (2.0 * n / ax) * j[static_cast<std::size_t>(n)] - j[static_cast<std::size_t>(n) + 1];
        // rescale to stay in range; ratios are all that matter
        if (std::abs(j[static_cast<std::size_t>(n) - 1]) > 1e250) {
            for (int k = n - 1; k <= start; ++k) j[static_cast<std::size_t>(k)] *= 1e-250;
            norm *= 1e-250;
        }
        if ((n - 1) % 2 == 0 && n - 1 > 0) norm += 2.0 * j[static_cast<std::size_t>(n) - 1];
    }
    norm += j[0];
    for (int n = 0; n <= max_order; ++n) {
        double v = j[static_cast<std::size_t>(n)] / norm;
        if (x < 0.0 && (n % 2) != 0) v = -v;
        out[static_cast<std::size_t>(n)] = v;
    }
    return out;
}

/// J_n(x) for any integer n, using J_{-n} = (-1)^n J_n.
inline double bessel_j(int n, double x) {
    const int an = std::abs(n);
    const double v = bessel_j_orders(x, an)[static_cast<std::size_t>(an)];
    return (n < 0 && (an % 2) != 0) ? -v : v;
}

}  // namespace tbc
