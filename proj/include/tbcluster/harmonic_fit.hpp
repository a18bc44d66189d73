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

#include <array>
#include <cmath>
#include <vector>

#include "tbcluster/error.hpp"

namespace tbc {

/// y ≈ c0 + c1 cos(kx) + c2 sin(kx), fitted by linear least squares.
struct HarmonicFit {
    double offset = 0.0;
    double cos_coef = 0.0;
    double sin_coef = 0.0;
    double residual_rms = 0.0;

    double amplitude() const { return std::hypot(cos_coef, sin_coef); }

    /// Contrast amplitude/offset, clipped to [0, 1].
    double visibility() const {
        if (!(offset > 0.0)) return 0.0;
        const double v = amplitude() / offset;
        return v > 1.0 ? 1.0 : v;
    }

    /// φ₀ in c0 (1 + V cos(kx + φ₀)).
    double phase() const { return std::atan2(-sin_coef, cos_coef); }
};

inline HarmonicFit fit_harmonic(const std::vector<double> &x, const std::vector<double> &y, int k) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "fit abscissa and ordinate differ in length");
    if (x.size() < 3) throw Error(ErrorCode::InsufficientScan, "a harmonic fit needs at least three points");
    std::array<std::array<double, 4>, 3> a{};  // augmented normal equations
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double b[3] = {1.0, std::cos(k * x[i]), std::sin(k * x[i])};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) a[r][c] += b[r] * b[c];
            a[r][3] += b[r] * y[i];
        }
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12 * static_cast<double>(x.size())) {
            throw Error(ErrorCode::InsufficientScan, "scan points do not determine the harmonic fit");
        }
        std::swap(a[col], a[piv]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    HarmonicFit fit{a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2], 0.0};
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.offset + fit.cos_coef * std::cos(k * x[i]) + fit.sin_coef * std::sin(k * x[i]));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(x.size()));
    return fit;
}

}  // namespace tbc
