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

/**
 * @file
 * Discrete chirped-pulse modulation. Chirp, sinusoidal phase modulation
 * V(t) = V₀ sin(Ωt + α) and the inverse chirp act on a mode as
 *     |ν, t⟩ → Σ_m J_m(g) e^{-imα} |ν + mΔν, t + mΔt⟩,
 * with g = V₀/V_π, Δν = Ω/2π, Δt = β₂Ω and β₂ = D λ² / (2πc).
 *
 * At the balance point g* (first J₀ = J₁ crossing) the operator acts as a
 * time-bin beam splitter on a pair of bins b₀ < b₁ = b₀ + Δt. With input
 * a|b₀⟩ + b|b₁⟩ the two retained outputs are
 *     bin b₁:  J₁ e^{-iα} a + J₀ b      (projection on |0⟩ + e^{-iα}|1⟩)
 *     bin b₀:  J₀ a − J₁ e^{iα} b       (projection on |0⟩ − e^{-iα}|1⟩)
 * so α = 0 measures X and the later output is the +1 outcome.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "tbcluster/bessel.hpp"
#include "tbcluster/core_modes.hpp"
#include "tbcluster/encoding.hpp"
#include "tbcluster/error.hpp"

namespace tbc {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kCarrierWavelengthNm = 1550.0;
inline constexpr int kDefaultTruncation = 8;
inline constexpr double kTruncationDefect = 1e-9;

/// Relative distance from the grid accepted when snapping Δt and Δν.
inline constexpr double kGridSnapTolerance = 5e-3;

inline double angular_frequency(double rf_ghz) { return 2.0 * std::numbers::pi * rf_ghz * 1e9; }

/// Group-velocity dispersion β₂ in ps² for a grating dispersion in ns/nm.
inline double beta2_ps2(double dispersion_ns_per_nm, double wavelength_nm = kCarrierWavelengthNm) {
    const double d_si = dispersion_ns_per_nm;  // ns/nm == s/m
    const double lambda = wavelength_nm * 1e-9;
    return d_si * lambda * lambda / (2.0 * std::numbers::pi * kSpeedOfLight) * 1e24;
}

struct CpmSettings {
    double g = 0.0;
    double omega = angular_frequency(1.25);  // rad/s
    double alpha = 0.0;
    double dispersion_ns_per_nm = 10.0;
    double carrier_wavelength_nm = kCarrierWavelengthNm;
    int truncation_order = kDefaultTruncation;

    double beta2() const { return beta2_ps2(dispersion_ns_per_nm, carrier_wavelength_nm); }

    /// Time shift per order in ps.
    double delta_t_ps() const { return beta2() * omega * 1e-12; }

    /// Frequency shift per order in GHz.
    double delta_nu_ghz() const { return omega / (2.0 * std::numbers::pi) * 1e-9; }

    void validate() const {
        if (!(g >= 0.0)) throw Error(ErrorCode::InvalidArgument, "modulation depth must be nonnegative");
        if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "RF angular frequency must be positive");
        if (dispersion_ns_per_nm == 0.0) throw Error(ErrorCode::InvalidArgument, "dispersion must be nonzero");
        if (truncation_order < 0) throw Error(ErrorCode::InvalidArgument, "truncation order must be nonnegative");
    }
};

/// Σ_{|m|≤M} J_m(g)².
inline double truncated_weight(double g, int order) {
    const auto j = bessel_j_orders(g, order);
    double s = j[0] * j[0];
    for (int m = 1; m <= order; ++m) s += 2.0 * j[static_cast<std::size_t>(m)] * j[static_cast<std::size_t>(m)];
    return s;
}

struct GridShift {
    std::int64_t t_steps = 0;
    std::int64_t f_steps = 0;
    double delta_t_ps = 0.0;
    double delta_nu_ghz = 0.0;
};

namespace detail {

inline std::int64_t snap(double value, double quantum, const char *what) {
    const double q = value / quantum;
    const double r = std::round(q);
    if (r == 0.0 || std::abs(q - r) > kGridSnapTolerance * std::abs(r)) {
        throw Error(ErrorCode::GridMismatch, std::string(what) + " of " + std::to_string(value) +
                                                 " is not a whole number of grid quanta (" + std::to_string(quantum) +
                                                 ")");
    }
    return static_cast<std::int64_t>(r);
}

}  // namespace detail

/// Per-order shift in grid units. Throws GridMismatch when Δt or Δν is off-grid.
inline GridShift grid_shift(const CpmSettings &s, const ModeGrid &grid) {
    s.validate();
    grid.validate();
    GridShift out;
    out.delta_t_ps = s.delta_t_ps();
    out.delta_nu_ghz = s.delta_nu_ghz();
    out.t_steps = detail::snap(out.delta_t_ps, grid.time_quantum_ps, "time shift");
    out.f_steps = detail::snap(out.delta_nu_ghz, grid.freq_quantum_ghz, "frequency shift");
    return out;
}

/**
 * The mode map of the operator above, truncated to |m| ≤ M. With
 * enforce_truncation, throws TruncationInadequate when the dropped orders
 * carry more than 1e-9 of the probability.
 */
inline ModeMap cpm_mode_map(const CpmSettings &s, const ModeGrid &grid, bool enforce_truncation = true) {
    const GridShift shift = grid_shift(s, grid);
    const int M = s.truncation_order;
    if (enforce_truncation && truncated_weight(s.g, M) < 1.0 - kTruncationDefect) {
        throw Error(ErrorCode::TruncationInadequate,
                    "truncation order " + std::to_string(M) + " is too small for g = " + std::to_string(s.g));
    }
    const auto j = bessel_j_orders(s.g, M);
    WeightedModes offsets;
    for (int m = -M; m <= M; ++m) {
        double jm = j[static_cast<std::size_t>(std::abs(m))];
        if (m < 0 && (m % 2) != 0) jm = -jm;
        if (std::abs(jm) < kSparsityThreshold) continue;
        offsets.emplace_back(TimeFreqMode{m * shift.t_steps, m * shift.f_steps},
                             std::polar(1.0, -static_cast<double>(m) * s.alpha) * jm);
    }
    return [offsets = std::move(offsets)](const TimeFreqMode &in) {
        WeightedModes out;
        out.reserve(offsets.size());
        for (const auto &[d, w] : offsets) out.emplace_back(TimeFreqMode{in.t_index + d.t_index, in.f_index + d.f_index}, w);
        return out;
    };
}

/// Smallest g > 0 with J₀(g) = J₁(g), by bisection on [1, 2].
inline double solve_balanced_depth() {
    auto f = [](double g) {
        const auto j = bessel_j_orders(g, 1);
        return j[0] - j[1];
    };
    double lo = 1.0;
    double hi = 2.0;
    double flo = f(lo);
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// η(g) = J₀(g)² + J₁(g)².
inline double efficiency(double g) {
    if (!(g >= 0.0)) throw Error(ErrorCode::InvalidArgument, "modulation depth must be nonnegative");
    const auto j = bessel_j_orders(g, 1);
    return j[0] * j[0] + j[1] * j[1];
}

enum class SettingKind { Z, X, RotatedXY };

struct BeamSplitterSetting {
    SettingKind kind = SettingKind::Z;
    std::string level;
    double alpha = 0.0;

    static BeamSplitterSetting z() { return {SettingKind::Z, "", 0.0}; }
    static BeamSplitterSetting x(std::string level) { return {SettingKind::X, std::move(level), 0.0}; }
    static BeamSplitterSetting rotated(std::string level, double alpha) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double a = std::fmod(alpha, two_pi);
        if (a < 0.0) a += two_pi;
        return {SettingKind::RotatedXY, std::move(level), a};
    }

    /// Short label such as "Z", "X_t" or "XY_T(0.785398)".
    std::string label() const {
        switch (kind) {
            case SettingKind::Z:
                return "Z";
            case SettingKind::X:
                return "X_" + level;
            case SettingKind::RotatedXY:
                return "XY_" + level + "(" + std::to_string(alpha) + ")";
        }
        return "?";
    }

    bool operator==(const BeamSplitterSetting &) const = default;
};

/// CPM settings that realize the beam splitter of one level.
inline CpmSettings level_settings(const Level &level, const CpmSettings &base, double g, double alpha) {
    CpmSettings s = base;
    s.g = g;
    s.omega = angular_frequency(level.rf_ghz);
    s.alpha = alpha;
    return s;
}

struct MeasurementMap {
    ModeMap map;
    double efficiency_tag = 1.0;
    std::int64_t pair_t_steps = 0;  // 0 for Z
    std::int64_t pair_f_steps = 0;
};

/**
 * Z is the identity. X and RotatedXY run CPM at g* on the level's RF tone
 * with α = 0 or the given angle. Throws UnknownLevel for a missing level and
 * InconsistentSettings when the resulting shift does not bridge the level.
 */
inline MeasurementMap measurement_map(const BeamSplitterSetting &setting, const LevelSpec &levels,
                                      const CpmSettings &base, const ModeGrid &grid) {
    if (setting.kind == SettingKind::Z) return {identity_map(), 1.0, 0, 0};
    const Level &level = levels.level(setting.level);
    const double g = solve_balanced_depth();
    const double alpha = setting.kind == SettingKind::X ? 0.0 : setting.alpha;
    const CpmSettings s = level_settings(level, base, g, alpha);
    const GridShift shift = grid_shift(s, grid);
    if (std::abs(static_cast<double>(shift.t_steps) * grid.time_quantum_ps - level.shift_ps) > 1e-9) {
        throw Error(ErrorCode::InconsistentSettings,
                    "RF tone of level '" + level.name + "' shifts by " + std::to_string(shift.delta_t_ps) +
                        " ps, level needs " + std::to_string(level.shift_ps) + " ps");
    }
    return {cpm_mode_map(s, grid), efficiency(g), shift.t_steps, shift.f_steps};
}

}  // namespace tbc
