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
 * Continuous-field numerics for chirped-pulse modulation.
 *
 * Fields are complex envelopes sampled on a uniform grid (ps). The spectrum
 * is taken with the forward DFT, Ẽ(ω) = Σ E(t) e^{-iωt}, so a spectral phase
 * φ(ω) delays the frequency component ω by −φ'(ω). A chirp multiplies the
 * spectrum by exp(iβ₂ω²/2) and maps ω to the time −β₂ω; modulation by
 * exp(ig sin(Ωt − α)) followed by the opposite chirp yields copies of the
 * input at mΔt = mβ₂Ω with carrier shifts +mΩ and weights ≈ J_m(g) e^{-imα}.
 *
 * Copies of neighbouring time bins that overlap in time carry different
 * carriers, which caps the two-bin interference contrast (spectral walk-off).
 */

#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include "tbcluster/cpm.hpp"
#include "tbcluster/error.hpp"
#include "tbcluster/harmonic_fit.hpp"

namespace tbc {

using Complex = std::complex<double>;

namespace detail {

inline std::mutex &fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// In-place DFT; sign is FFTW_FORWARD or FFTW_BACKWARD (unnormalized).
inline void fft_inplace(std::vector<Complex> &data, int sign) {
    auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace detail

/// Angular frequency in rad/ps of DFT bin k for n samples spaced dt ps.
inline double dft_omega(std::size_t k, std::size_t n, double dt_ps) {
    const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    return 2.0 * std::numbers::pi * kk / (static_cast<double>(n) * dt_ps);
}

struct SampledField {
    std::vector<Complex> samples;
    double dt_ps = 1.0;
    double t0_ps = 0.0;
    double carrier_offset_ghz = 0.0;

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t k) const { return t0_ps + static_cast<double>(k) * dt_ps; }

    double energy() const {
        double e = 0.0;
        for (const Complex &s : samples) e += std::norm(s);
        return e * dt_ps;
    }

    /// ∫|E|² over [t_lo, t_hi).
    double energy_between(double t_lo, double t_hi) const {
        double e = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double t = time_at(k);
            if (t >= t_lo && t < t_hi) e += std::norm(samples[k]);
        }
        return e * dt_ps;
    }

    void validate() const {
        if (!detail::is_power_of_two(samples.size())) {
            throw Error(ErrorCode::InvalidArgument, "sample count must be a power of two");
        }
        if (!(dt_ps > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample spacing must be positive");
    }
};

struct ChirpSpec {
    double dispersion_ns_per_nm = 10.0;
    double carrier_wavelength_nm = kCarrierWavelengthNm;

    double beta2() const { return beta2_ps2(dispersion_ns_per_nm, carrier_wavelength_nm); }
    ChirpSpec inverse() const { return {-dispersion_ns_per_nm, carrier_wavelength_nm}; }
};

/// σ of the amplitude envelope exp(−t²/2σ²) whose intensity has the given FWHM.
inline double gaussian_sigma(double intensity_fwhm_ps) { return intensity_fwhm_ps / (2.0 * std::sqrt(std::log(2.0))); }

/// Adds a Gaussian pulse (amplitude envelope, intensity FWHM) centred at center_ps.
inline void add_gaussian(SampledField &field, double center_ps, double fwhm_ps, Complex amplitude = 1.0) {
    const double s = gaussian_sigma(fwhm_ps);
    for (std::size_t k = 0; k < field.size(); ++k) {
        const double u = (field.time_at(k) - center_ps) / s;
        if (std::abs(u) < 40.0) field.samples[k] += amplitude * std::exp(-0.5 * u * u);
    }
}

inline SampledField gaussian_pulse(std::size_t n, double dt_ps, double t0_ps, double center_ps, double fwhm_ps,
                                   double carrier_offset_ghz = 0.0) {
    SampledField f{std::vector<Complex>(n, Complex{}), dt_ps, t0_ps, carrier_offset_ghz};
    f.validate();
    add_gaussian(f, center_ps, fwhm_ps);
    return f;
}

/// Fraction of the energy that must stay out of each guard band.
inline constexpr double kWindowLeakTolerance = 1e-9;

/**
 * Multiplies the spectrum by exp(iβ₂(ω + ω_c)²/2). The linear part from the
 * carrier offset ω_c moves the envelope by −β₂ω_c and is applied to t0 so the
 * window does not need to hold it. Throws WindowOverflow when more than 1e-9
 * of the energy ends up in the outer 1/32 of the window on either side.
 */
inline SampledField apply_chirp(const SampledField &field, const ChirpSpec &chirp) {
    field.validate();
    if (chirp.dispersion_ns_per_nm == 0.0) throw Error(ErrorCode::InvalidArgument, "chirp dispersion must be nonzero");
    const std::size_t n = field.size();
    const double b2 = chirp.beta2();
    const double wc = 2.0 * std::numbers::pi * field.carrier_offset_ghz * 1e-3;  // rad/ps
    SampledField out = field;
    detail::fft_inplace(out.samples, FFTW_FORWARD);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = dft_omega(k, n, field.dt_ps);
        out.samples[k] *= std::polar(inv_n, 0.5 * b2 * (w * w + wc * wc));
    }
    detail::fft_inplace(out.samples, FFTW_BACKWARD);
    out.t0_ps = field.t0_ps - b2 * wc;

    const std::size_t guard = n / 32;
    double total = 0.0;
    double edge = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::norm(out.samples[k]);
        total += p;
        if (k < guard || k >= n - guard) edge += p;
    }
    if (total > 0.0 && edge > kWindowLeakTolerance * total) {
        throw Error(ErrorCode::WindowOverflow, "stretched field reaches the window edge (leaked fraction " +
                                                   std::to_string(edge / total) + ")");
    }
    return out;
}

/// Multiplies by exp(i g sin(Ω t + α)) in absolute time; omega in rad/s.
inline SampledField phase_modulate(const SampledField &field, double g, double omega, double alpha) {
    SampledField out = field;
    const double w = omega * 1e-12;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.samples[k] *= std::polar(1.0, g * std::sin(w * out.time_at(k) + alpha));
    }
    return out;
}

/// Chirp, modulate, inverse chirp. The modulation phase is −α so that copy m
/// carries J_m(g) e^{-imα}, matching the discrete operator.
inline SampledField cpm_continuous(const SampledField &field, const ChirpSpec &chirp, double g, double omega,
                                   double alpha) {
    return apply_chirp(phase_modulate(apply_chirp(field, chirp), g, omega, -alpha), chirp.inverse());
}

/// Power spectrum |Ẽ|² with frequencies in GHz relative to the band centre, ascending.
struct PowerSpectrum {
    std::vector<double> freq_ghz;
    std::vector<double> power;
};

inline PowerSpectrum power_spectrum(const SampledField &field) {
    field.validate();
    std::vector<Complex> s = field.samples;
    detail::fft_inplace(s, FFTW_FORWARD);
    const std::size_t n = s.size();
    PowerSpectrum ps;
    ps.freq_ghz.resize(n);
    ps.power.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = (j + n / 2) % n;
        ps.freq_ghz[j] = dft_omega(k, n, field.dt_ps) / (2.0 * std::numbers::pi) * 1e3 + field.carrier_offset_ghz;
        ps.power[j] = std::norm(s[k]) * field.dt_ps * field.dt_ps;
    }
    return ps;
}

struct Spectrogram {
    std::vector<double> times_ps;
    std::vector<double> freqs_ghz;
    std::vector<std::vector<double>> intensity;  // [time][frequency]
};

struct SpectrogramOptions {
    double t_min_ps = -400.0;
    double t_max_ps = 400.0;
    double t_step_ps = 5.0;
    double f_min_ghz = -10.0;
    double f_max_ghz = 10.0;
};

/**
 * Gabor spectrogram with a Gaussian gate of the given intensity FWHM. Each
 * row is |DFT(E · gate(t − τ))|² over a local segment long enough to hold
 * the gate; frequencies are reported in GHz including the carrier offset.
 */
inline Spectrogram spectrogram(const SampledField &field, double window_fwhm_ps,
                               const SpectrogramOptions &opt = SpectrogramOptions{}) {
    field.validate();
    if (!(window_fwhm_ps > 2.0 * field.dt_ps)) {
        throw Error(ErrorCode::InvalidArgument, "spectrogram window must exceed two samples");
    }
    const double s = gaussian_sigma(window_fwhm_ps);
    std::size_t seg = 64;
    while (static_cast<double>(seg) * field.dt_ps < 2.0 * 8.0 * s || static_cast<double>(seg) * field.dt_ps < 2000.0)
        seg *= 2;
    Spectrogram sg;
    std::vector<std::size_t> fbins;
    for (std::size_t j = 0; j < seg; ++j) {
        const std::size_t k = (j + seg / 2) % seg;
        const double f = dft_omega(k, seg, field.dt_ps) / (2.0 * std::numbers::pi) * 1e3 + field.carrier_offset_ghz;
        if (f >= opt.f_min_ghz && f <= opt.f_max_ghz) {
            fbins.push_back(k);
            sg.freqs_ghz.push_back(f);
        }
    }
    std::vector<Complex> buf(seg);
    for (double tau = opt.t_min_ps; tau <= opt.t_max_ps + 1e-9; tau += opt.t_step_ps) {
        const double c = (tau - field.t0_ps) / field.dt_ps;
        const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(std::llround(c)) - static_cast<std::ptrdiff_t>(seg / 2);
        for (std::size_t j = 0; j < seg; ++j) {
            const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(j);
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(field.size())) {
                buf[j] = 0.0;
                continue;
            }
            const double u = (field.time_at(static_cast<std::size_t>(idx)) - tau) / s;
            buf[j] = field.samples[static_cast<std::size_t>(idx)] * std::exp(-0.5 * u * u);
        }
        detail::fft_inplace(buf, FFTW_FORWARD);
        std::vector<double> row;
        row.reserve(fbins.size());
        for (std::size_t k : fbins) row.push_back(std::norm(buf[k]));
        sg.times_ps.push_back(tau);
        sg.intensity.push_back(std::move(row));
    }
    return sg;
}

/// Smallest power-of-two window (≥ 2^12 samples) holding a pulse train of the
/// given span after stretching by |β₂|.
inline std::size_t window_samples(double span_ps, double fwhm_ps, double beta2_abs_ps2, double dt_ps,
                                  double extra_bandwidth_rad_per_ps = 0.0) {
    const double s = gaussian_sigma(fwhm_ps);
    const double half_band = 6.5 / s + extra_bandwidth_rad_per_ps;
    const double stretched = span_ps + 2.0 * beta2_abs_ps2 * half_band + 16.0 * s;
    const double needed = stretched * 32.0 / 28.0 + 400.0;
    std::size_t n = std::size_t{1} << 12;
    while (static_cast<double>(n) * dt_ps < needed) n *= 2;
    return n;
}

struct VisibilityResult {
    double visibility = 0.0;
    double phase = 0.0;
    std::vector<double> alphas;
    std::vector<double> window_energy;
};

struct VisibilityOptions {
    double dt_ps = 1.0;
    int alpha_points = 16;
    double g = -1.0;  // < 0 selects the balance point
};

/**
 * Two equal Gaussian bins at 0 and bin_separation pass through CPM at the
 * balance point; the energy inside ±separation/2 around the later bin is
 * recorded over a full α period and V is the contrast of the first-harmonic
 * fit. Throws InconsistentSettings unless β₂Ω matches the separation.
 */
inline VisibilityResult visibility_bound(double bin_separation_ps, double pulse_fwhm_ps, const ChirpSpec &chirp,
                                         double omega, const VisibilityOptions &opt = VisibilityOptions{}) {
    const double dt_shift = chirp.beta2() * omega * 1e-12;
    if (!(bin_separation_ps > 0.0) || std::abs(std::abs(dt_shift) - bin_separation_ps) > kGridSnapTolerance * bin_separation_ps) {
        throw Error(ErrorCode::InconsistentSettings, "β₂Ω = " + std::to_string(dt_shift) + " ps does not match the " +
                                                         std::to_string(bin_separation_ps) + " ps bin separation");
    }
    if (opt.alpha_points < 8) throw Error(ErrorCode::InsufficientScan, "visibility scan needs at least 8 phases");
    const double g = opt.g < 0.0 ? solve_balanced_depth() : opt.g;
    // room for the copies up to the default truncation order on both sides
    const double span = bin_separation_ps * (2.0 * (kDefaultTruncation + 1) + 1.0);
    const std::size_t n = window_samples(span, pulse_fwhm_ps, std::abs(chirp.beta2()), opt.dt_ps, 0.0);
    const double t0 = std::floor((0.5 * bin_separation_ps - 0.5 * static_cast<double>(n) * opt.dt_ps) / opt.dt_ps) * opt.dt_ps;
    SampledField in{std::vector<Complex>(n, Complex{}), opt.dt_ps, t0, 0.0};
    add_gaussian(in, 0.0, pulse_fwhm_ps);
    add_gaussian(in, bin_separation_ps, pulse_fwhm_ps);
    const SampledField stretched = apply_chirp(in, chirp);

    // the later output bin sits at the copy position of the first bin
    const double center = dt_shift > 0.0 ? bin_separation_ps : 0.0;
    VisibilityResult res;
    for (int k = 0; k < opt.alpha_points; ++k) {
        const double alpha = 2.0 * std::numbers::pi * k / opt.alpha_points;
        const SampledField out = apply_chirp(phase_modulate(stretched, g, omega, -alpha), chirp.inverse());
        res.alphas.push_back(alpha);
        res.window_energy.push_back(
            out.energy_between(center - 0.5 * bin_separation_ps, center + 0.5 * bin_separation_ps));
    }
    const HarmonicFit fit = fit_harmonic(res.alphas, res.window_energy, 1);
    res.visibility = fit.visibility();
    res.phase = fit.phase();
    return res;
}

/// Closed form of the walk-off bound for exactly shifted Gaussian copies:
/// |⟨E e^{iΩt}, E⟩| / ⟨E, E⟩ = exp(−(Ωσ)²/4), σ the amplitude width.
inline double visibility_bound_analytic(double pulse_fwhm_ps, double omega) {
    const double s = gaussian_sigma(pulse_fwhm_ps);
    const double w = omega * 1e-12;
    return std::exp(-0.25 * w * w * s * s);
}

/// RF angular frequency (rad/s) whose CPM shift bridges the separation.
inline double omega_for_separation(double bin_separation_ps, const ChirpSpec &chirp) {
    return bin_separation_ps / std::abs(chirp.beta2()) * 1e12;
}

struct VisibilityScanRow {
    double dispersion_ns_per_nm = 0.0;
    double bin_separation_ps = 0.0;
    double visibility = 0.0;
};

/// Visibility versus dispersion with Ω chosen per point so β₂Ω equals the separation.
inline std::vector<VisibilityScanRow> visibility_scan(const std::vector<double> &dispersions,
                                                      const std::vector<double> &separations, double pulse_fwhm_ps,
                                                      const VisibilityOptions &opt = VisibilityOptions{}) {
    if (dispersions.empty() || separations.empty()) {
        throw Error(ErrorCode::InsufficientScan, "visibility scan needs at least one dispersion and one separation");
    }
    std::vector<VisibilityScanRow> rows;
    for (double sep : separations) {
        for (double d : dispersions) {
            const ChirpSpec chirp{d, kCarrierWavelengthNm};
            const auto r = visibility_bound(sep, pulse_fwhm_ps, chirp, omega_for_separation(sep, chirp), opt);
            rows.push_back({d, sep, r.visibility});
        }
    }
    return rows;
}

/**
 * Complex weights of copies −M..M in a CPM output for a single Gaussian input
 * centred at 0. Copy m is referenced to the symmetric time-frequency
 * displacement of the input, E_in(t − mΔt) e^{imΩ(t − mΔt/2)}; overlapping
 * copies are separated by solving the Gram system of these references.
 */
inline std::vector<Complex> copy_weights(const SampledField &out, double pulse_fwhm_ps, int max_order,
                                         double delta_t_ps, double omega) {
    const double s = gaussian_sigma(pulse_fwhm_ps);
    const double w = omega * 1e-12;
    const int n = 2 * max_order + 1;
    std::vector<std::vector<Complex>> refs(static_cast<std::size_t>(n), std::vector<Complex>(out.size()));
    for (int j = 0; j < n; ++j) {
        const int m = j - max_order;
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double t = out.time_at(k);
            const double u = (t - m * delta_t_ps) / s;
            refs[static_cast<std::size_t>(j)][k] =
                std::abs(u) > 40.0 ? Complex{} : std::exp(-0.5 * u * u) * std::polar(1.0, m * w * (t - 0.5 * m * delta_t_ps));
        }
    }
    // augmented Gram system G x = b
    std::vector<std::vector<Complex>> a(static_cast<std::size_t>(n), std::vector<Complex>(static_cast<std::size_t>(n) + 1));
    for (int r = 0; r < n; ++r) {
        const auto &rr = refs[static_cast<std::size_t>(r)];
        for (int c = 0; c < n; ++c) {
            const auto &rc = refs[static_cast<std::size_t>(c)];
            Complex acc{};
            for (std::size_t k = 0; k < out.size(); ++k) acc += std::conj(rr[k]) * rc[k];
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = acc;
        }
        Complex acc{};
        for (std::size_t k = 0; k < out.size(); ++k) acc += std::conj(rr[k]) * out.samples[k];
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)] = acc;
    }
    for (int col = 0; col < n; ++col) {
        const auto c = static_cast<std::size_t>(col);
        for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
            if (r == c) continue;
            const Complex f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= static_cast<std::size_t>(n); ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<Complex> x(static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) x[r] = a[r][static_cast<std::size_t>(n)] / a[r][r];
    return x;
}

/// Intensity centroid (ps) of the field inside [t_lo, t_hi).
inline double intensity_centroid(const SampledField &f, double t_lo, double t_hi) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double t = f.time_at(k);
        if (t < t_lo || t >= t_hi) continue;
        const double p = std::norm(f.samples[k]);
        num += p * t;
        den += p;
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Peak time (ps) of |E|² inside [t_lo, t_hi), refined by a parabola through
/// the log intensity of the three samples around the maximum.
inline double intensity_peak(const SampledField &f, double t_lo, double t_hi) {
    std::size_t best = f.size();
    double pmax = -1.0;
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
        const double t = f.time_at(k);
        if (t < t_lo || t >= t_hi) continue;
        const double p = std::norm(f.samples[k]);
        if (p > pmax) {
            pmax = p;
            best = k;
        }
    }
    if (best == f.size() || pmax <= 0.0) return 0.5 * (t_lo + t_hi);
    const double l0 = std::log(std::norm(f.samples[best - 1]));
    const double l1 = std::log(pmax);
    const double l2 = std::log(std::norm(f.samples[best + 1]));
    const double den = l0 - 2.0 * l1 + l2;
    const double off = den < 0.0 ? 0.5 * (l0 - l2) / den : 0.0;
    return f.time_at(best) + off * f.dt_ps;
}

/// Spectral centroid (GHz) of the part of the field inside [t_lo, t_hi).
inline double spectral_centroid(const SampledField &f, double t_lo, double t_hi) {
    SampledField cut = f;
    for (std::size_t k = 0; k < cut.size(); ++k) {
        const double t = cut.time_at(k);
        if (t < t_lo || t >= t_hi) cut.samples[k] = 0.0;
    }
    const PowerSpectrum ps = power_spectrum(cut);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < ps.power.size(); ++j) {
        num += ps.power[j] * ps.freq_ghz[j];
        den += ps.power[j];
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace tbc
