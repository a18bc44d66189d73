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
 * Fiber link: insertion loss, compensated dispersion, thermal time-of-flight
 * drift and the periodic delay-line correction loop.
 *
 * Temperature follows a stationary Matérn-3/2 Gauss–Markov process (the
 * smooth second-order member of the family), sampled exactly:
 *     x = (T, dT/dt),  x_{k+1} = Φ x_k + w_k,  w_k ~ N(0, Q),
 *     Φ = e^{−λΔ} [[1 + λΔ, Δ], [−λ²Δ, 1 − λΔ]],  Q = P∞ − Φ P∞ Φᵀ,
 *     P∞ = diag(σ², λ²σ²),  λ = 1 / τ,
 * i.e. the covariance σ²(1 + |r|/τ) e^{−|r|/τ} with correlation time τ.
 * The path is clipped at ±clip and mapped to ps through
 * thermal_sensitivity · length.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tbcluster/core_modes.hpp"
#include "tbcluster/encoding.hpp"
#include "tbcluster/error.hpp"

namespace tbc {

struct FiberLink {
    double length_km = 25.0;
    double loss_db = 5.3;
    double dispersion_ps_per_nm = 425.0;
    double compensator_dispersion_ps_per_nm = -450.0;
    double compensator_loss_db = 2.4;
    double thermal_sensitivity_ps_per_k_km = 36.8;
    double residual_dispersion_ps_per_nm = 0.0;

    void validate() const {
        if (!(length_km >= 0.0)) throw Error(ErrorCode::InvalidArgument, "link length must be nonnegative");
        if (!(loss_db >= 0.0) || !(compensator_loss_db >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "insertion losses must be nonnegative");
        }
    }

    /// Retained probability 10^(−(loss + compensator loss)/10); 1 for a zero-length link.
    double transmission() const {
        if (length_km == 0.0) return 1.0;
        return std::pow(10.0, -(loss_db + compensator_loss_db) / 10.0);
    }

    /// Offset in ps per kelvin of uniform fiber temperature change.
    double ps_per_kelvin() const { return thermal_sensitivity_ps_per_k_km * length_km; }
};

struct DriftTrace {
    std::vector<double> times_s;
    std::vector<double> offsets_ps;
    double peak_bound_ps = 0.0;

    std::size_t size() const { return times_s.size(); }

    /// Linear interpolation, clamped to the ends; 0 for an empty trace.
    double offset_at(double t_s) const {
        if (times_s.empty()) return 0.0;
        if (t_s <= times_s.front()) return offsets_ps.front();
        if (t_s >= times_s.back()) return offsets_ps.back();
        const auto it = std::upper_bound(times_s.begin(), times_s.end(), t_s);
        const std::size_t k = static_cast<std::size_t>(it - times_s.begin());
        const double f = (t_s - times_s[k - 1]) / (times_s[k] - times_s[k - 1]);
        return offsets_ps[k - 1] + f * (offsets_ps[k] - offsets_ps[k - 1]);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : offsets_ps) m = std::max(m, std::abs(v));
        return m;
    }
};

inline double rms(const std::vector<double> &v, std::size_t from = 0) {
    if (from >= v.size()) return 0.0;
    double s = 0.0;
    for (std::size_t k = from; k < v.size(); ++k) s += v[k] * v[k];
    return std::sqrt(s / static_cast<double>(v.size() - from));
}

struct TransmitResult {
    JointTwoPhotonState state;
    double arrival_offset_ps = 0.0;
};

/**
 * Applies the link loss to the amplitudes (√transmission), leaving the
 * relative structure intact, and reads the arrival offset from the drift
 * trace at the transmission time when one is given.
 */
inline TransmitResult transmit(const JointTwoPhotonState &state, const FiberLink &link,
                               const DriftTrace *drift = nullptr, double time_s = 0.0) {
    link.validate();
    if (link.length_km == 0.0) return {state, 0.0};
    TransmitResult out{scale_amplitudes(state, Amplitude{std::sqrt(link.transmission()), 0.0}), 0.0};
    if (drift != nullptr) out.arrival_offset_ps = drift->offset_at(time_s);
    return out;
}

struct TemperatureModel {
    double sd_k = 0.0333;
    double correlation_time_s = 3.0 * 3600.0;
    double clip_k = 0.1;
    double sample_interval_s = 10.0;

    void validate() const {
        if (!(sd_k >= 0.0) || !(clip_k >= 0.0)) throw Error(ErrorCode::InvalidArgument, "temperature scales must be nonnegative");
        if (!(correlation_time_s > 0.0) || !(sample_interval_s > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "correlation time and sample interval must be positive");
        }
    }
};

/// Temperature deviation path in kelvin, one value per sample, starting from
/// a draw of the stationary distribution.
inline std::vector<double> simulate_temperature(const TemperatureModel &m, std::size_t samples, std::uint64_t seed) {
    m.validate();
    std::vector<double> out(samples, 0.0);
    if (m.sd_k == 0.0 || samples == 0) return out;
    const double lam = 1.0 / m.correlation_time_s;
    const double d = m.sample_interval_s;
    const double e = std::exp(-lam * d);
    const double f00 = e * (1.0 + lam * d), f01 = e * d, f10 = -e * lam * lam * d, f11 = e * (1.0 - lam * d);
    const double p0 = m.sd_k * m.sd_k;
    const double p1 = lam * lam * p0;
    // Q = P∞ − Φ P∞ Φᵀ
    const double q00 = p0 - (f00 * f00 * p0 + f01 * f01 * p1);
    const double q01 = -(f00 * f10 * p0 + f01 * f11 * p1);
    const double q11 = p1 - (f10 * f10 * p0 + f11 * f11 * p1);
    const double l00 = std::sqrt(std::max(q00, 0.0));
    const double l10 = l00 > 0.0 ? q01 / l00 : 0.0;
    const double l11 = std::sqrt(std::max(q11 - l10 * l10, 0.0));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    double x0 = std::sqrt(p0) * n01(rng);
    double x1 = std::sqrt(p1) * n01(rng);
    for (std::size_t k = 0; k < samples; ++k) {
        out[k] = std::clamp(x0, -m.clip_k, m.clip_k);
        const double z0 = n01(rng);
        const double z1 = n01(rng);
        const double y0 = f00 * x0 + f01 * x1 + l00 * z0;
        const double y1 = f10 * x0 + f11 * x1 + l10 * z0 + l11 * z1;
        x0 = y0;
        x1 = y1;
    }
    return out;
}

/// Offset trace over [0, duration]; peak_bound_ps is ps_per_kelvin · clip.
inline DriftTrace simulate_drift(const FiberLink &link, double duration_s, const TemperatureModel &model,
                                 std::uint64_t seed) {
    link.validate();
    model.validate();
    if (!(duration_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "drift duration must be positive");
    const auto samples = static_cast<std::size_t>(std::floor(duration_s / model.sample_interval_s)) + 1;
    const auto temp = simulate_temperature(model, samples, seed);
    DriftTrace tr;
    tr.times_s.resize(samples);
    tr.offsets_ps.resize(samples);
    const double k = link.ps_per_kelvin();
    for (std::size_t i = 0; i < samples; ++i) {
        tr.times_s[i] = static_cast<double>(i) * model.sample_interval_s;
        tr.offsets_ps[i] = k * temp[i];
    }
    tr.peak_bound_ps = k * (model.sd_k == 0.0 ? 0.0 : model.clip_k);
    return tr;
}

struct StabilizerPolicy {
    double correction_interval_s = 900.0;
    double estimator_noise_ps = 0.5;
    double actuator_resolution_ps = 0.1;

    void validate() const {
        if (!(correction_interval_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "correction interval must be positive");
        if (!(estimator_noise_ps >= 0.0) || !(actuator_resolution_ps >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "estimator noise and actuator resolution must be nonnegative");
        }
    }
};

struct StabilizedTrace {
    DriftTrace residual;
    std::vector<double> corrections_ps;
    double rms_ps = 0.0;        // residual over the locked period
    double input_rms_ps = 0.0;  // uncorrected offsets over the same period
    std::size_t locked_from = 0;
    std::size_t epochs = 0;
};

/**
 * At every epoch k·interval (k ≥ 1) the delay line is set to the current
 * offset plus Gaussian estimator noise, quantized to the actuator step.
 * RMS values are taken from the first epoch on, or over the whole trace when
 * no epoch falls inside it.
 */
inline StabilizedTrace stabilize(const DriftTrace &trace, const StabilizerPolicy &policy, std::uint64_t seed) {
    policy.validate();
    StabilizedTrace out;
    out.residual = trace;
    out.corrections_ps.assign(trace.size(), 0.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    double correction = 0.0;
    double next_epoch = policy.correction_interval_s;
    bool locked = false;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.times_s[k];
        if (std::isfinite(next_epoch) && t >= next_epoch) {
            double est = trace.offsets_ps[k] + policy.estimator_noise_ps * n01(rng);
            if (policy.actuator_resolution_ps > 0.0) {
                est = std::round(est / policy.actuator_resolution_ps) * policy.actuator_resolution_ps;
            }
            correction = est;
            if (!locked) out.locked_from = k;
            locked = true;
            ++out.epochs;
            while (next_epoch <= t) next_epoch += policy.correction_interval_s;
        }
        out.corrections_ps[k] = correction;
        out.residual.offsets_ps[k] = trace.offsets_ps[k] - correction;
    }
    if (!locked) out.locked_from = 0;
    out.rms_ps = rms(out.residual.offsets_ps, out.locked_from);
    out.input_rms_ps = rms(trace.offsets_ps, out.locked_from);
    out.residual.peak_bound_ps = trace.peak_bound_ps;
    return out;
}

/// True when an uncorrected offset exceeds half the smallest bin spacing.
inline bool bin_assignment_corrupted(double offset_ps, const BinLayout &layout) {
    if (layout.count() < 2) return false;
    return std::abs(offset_ps) > 0.5 * layout.smallest_spacing_ps();
}

}  // namespace tbc
