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
 * Segment-scheduled coincidence measurement.
 *
 * Each photon passes the measurement map of its segment setting and is
 * detected frequency-blind: output amplitudes in the same time bin add
 * coherently, with the overlap of two copies whose frequency labels differ by
 * k pair steps weighted by V^{k²}, V being the visibility penalty of the
 * measured level. By default each beam splitter acts only inside its own bin
 * pair (orders leaving the pair are dropped as ancillary light);
 * cross_pair_scattering keeps the full truncated operator.
 *
 * White noise of weight p mixes the pure state with the uniform mixture of
 * the K² product bin states. Detection cells are ±window around each grid
 * time; each photon's arrival is smeared by a Gaussian of width
 * √(jitter² + tdc_jitter²) and shifted by its arrival offset.
 *
 * Outcome convention: Z reads the bin digits; an X or XY setting on a level
 * replaces that level's digit d by 1 − d (the later bin of a pair is the +1
 * outcome). Outcome index = T_s·8 + T_i·4 + t_s·2 + t_i for two levels.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tbcluster/core_modes.hpp"
#include "tbcluster/cpm.hpp"
#include "tbcluster/encoding.hpp"
#include "tbcluster/error.hpp"

namespace tbc {

struct JointSetting {
    std::string name;
    BeamSplitterSetting signal;
    BeamSplitterSetting idler;

    std::string label() const { return signal.label() + "," + idler.label(); }
};

struct ScheduleEntry {
    std::size_t segment = 0;
    Photon photon = Photon::Signal;
    BeamSplitterSetting setting;
};

struct SegmentPairing {
    std::string name;
    std::size_t signal_segment = 0;
    std::size_t idler_segment = 0;
    JointSetting joint;
};

struct SegmentSchedule {
    double frame_period_ns = 180.0;
    double segment_length_ns = 10.0;
    std::vector<ScheduleEntry> entries;
    std::vector<SegmentPairing> pairing;

    std::size_t segments() const {
        return static_cast<std::size_t>(std::llround(frame_period_ns / segment_length_ns));
    }

    std::vector<JointSetting> joint_settings() const {
        std::vector<JointSetting> out;
        for (const auto &p : pairing) out.push_back(p.joint);
        return out;
    }
};

/**
 * Nine joint settings {Z, X_inner, X_outer}² on alternating segments: signal
 * on segment 2k, idler on 2k + offset (mod segment count). Throws
 * UnsupportedLevels unless exactly two levels are configured.
 */
inline SegmentSchedule build_default_schedule(const LevelSpec &levels, std::size_t idler_offset = 5) {
    if (levels.size() != 2 || levels.arity != 2) {
        throw Error(ErrorCode::UnsupportedLevels,
                    "the default schedule needs two binary levels, got " + std::to_string(levels.size()));
    }
    SegmentSchedule s;
    const std::size_t n = s.segments();
    if (idler_offset % 2 == 0) throw Error(ErrorCode::InvalidArgument, "idler offset must be odd");
    const std::array<BeamSplitterSetting, 3> base{BeamSplitterSetting::z(), BeamSplitterSetting::x(levels.levels[1].name),
                                                  BeamSplitterSetting::x(levels.levels[0].name)};
    std::size_t k = 0;
    for (const auto &sig : base) {
        for (const auto &idl : base) {
            SegmentPairing p;
            p.name = std::string(1, static_cast<char>('a' + k));
            p.signal_segment = (2 * k) % n;
            p.idler_segment = (2 * k + idler_offset) % n;
            p.joint = JointSetting{p.name, sig, idl};
            s.entries.push_back({p.signal_segment, Photon::Signal, sig});
            s.entries.push_back({p.idler_segment, Photon::Idler, idl});
            s.pairing.push_back(std::move(p));
            ++k;
        }
    }
    return s;
}

struct DetectorModel {
    double jitter_signal_ps = 17.0;
    double jitter_idler_ps = 17.0;
    double tdc_jitter_ps = 18.0;
    double window_half_ps = 50.0;
    double dark_fraction = 0.0;
    double efficiency = 1.0;

    void validate() const {
        if (!(jitter_signal_ps >= 0.0) || !(jitter_idler_ps >= 0.0) || !(tdc_jitter_ps >= 0.0) ||
            !(dark_fraction >= 0.0) || !(efficiency >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "detector parameters must be nonnegative");
        }
        if (!(window_half_ps > 0.0)) throw Error(ErrorCode::InvalidArgument, "coincidence window must be positive");
    }

    double sigma_ps(Photon p) const {
        return std::hypot(p == Photon::Signal ? jitter_signal_ps : jitter_idler_ps, tdc_jitter_ps);
    }

    static DetectorModel ideal() { return DetectorModel{0.0, 0.0, 0.0, 50.0, 0.0, 1.0}; }
};

struct MeasurementModel {
    LevelSpec levels = LevelSpec::paper_default();
    CpmSettings cpm_base{};
    std::map<std::string, double> visibility_penalty;  // level name → V in (0, 1]; absent means 1
    double white_noise = 0.0;
    bool cross_pair_scattering = false;

    double penalty(const std::string &level) const {
        const auto it = visibility_penalty.find(level);
        return it == visibility_penalty.end() ? 1.0 : it->second;
    }

    void validate() const {
        if (!(white_noise >= 0.0 && white_noise <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "white-noise fraction must lie in [0, 1]");
        }
        for (const auto &[name, v] : visibility_penalty) {
            (void)levels.level(name);
            if (!(v > 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidArgument, "visibility penalty must lie in (0, 1]");
        }
    }
};

struct SamplingOptions {
    std::uint64_t pairs_per_setting = 1000000;
    bool exact = false;  // expected counts instead of Poisson draws
    double signal_offset_ps = 0.0;
    double idler_offset_ps = 0.0;
};

/// Probabilities or counts over a square block of detection cells.
struct CellGrid {
    std::int64_t cell_lo = 0;
    std::size_t cells = 0;
    std::vector<double> values;  // row = signal cell, column = idler cell

    double at(std::int64_t ts, std::int64_t ti) const {
        if (ts < cell_lo || ti < cell_lo) return 0.0;
        const auto s = static_cast<std::size_t>(ts - cell_lo);
        const auto i = static_cast<std::size_t>(ti - cell_lo);
        if (s >= cells || i >= cells) return 0.0;
        return values[s * cells + i];
    }

    double total() const {
        double t = 0.0;
        for (double v : values) t += v;
        return t;
    }
};

struct JointTemporalIntensity {
    JointSetting joint;
    CellGrid counts;
    std::vector<std::int64_t> orthogonal_cells;  // grid times of the layout bins

    double at(std::int64_t ts, std::int64_t ti) const { return counts.at(ts, ti); }

    /// Counts with at least one photon outside the orthogonal cells.
    double ancillary() const {
        double in = 0.0;
        for (auto s : orthogonal_cells)
            for (auto i : orthogonal_cells) in += counts.at(s, i);
        return counts.total() - in;
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct PhotonChannel {
    ModeMap map;
    double gram_v = 1.0;
    std::int64_t f_step = 0;

    double gram(std::int64_t df) const {
        if (df == 0 || gram_v == 1.0) return 1.0;
        const double k = f_step == 0 ? static_cast<double>(df) : static_cast<double>(df) / static_cast<double>(f_step);
        return std::pow(gram_v, k * k);
    }
};

inline PhotonChannel photon_channel(const BeamSplitterSetting &setting, const MeasurementModel &model,
                                    const ModeGrid &grid) {
    MeasurementMap mm = measurement_map(setting, model.levels, model.cpm_base, grid);
    PhotonChannel ch{mm.map, 1.0, mm.pair_f_steps};
    if (setting.kind == SettingKind::Z) return ch;
    ch.gram_v = model.penalty(setting.level);
    if (model.cross_pair_scattering) return ch;
    const std::size_t li = *model.levels.index_of(setting.level);
    const auto t_idx = default_layout(model.levels).t_indices(grid);
    std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> pair_of;
    for (const auto &[b0, b1] : level_pairs(model.levels, li)) {
        pair_of[t_idx[b0]] = {t_idx[b0], t_idx[b1]};
        pair_of[t_idx[b1]] = {t_idx[b0], t_idx[b1]};
    }
    ch.map = [full = std::move(mm.map), pair_of = std::move(pair_of)](const TimeFreqMode &in) {
        WeightedModes out = full(in);
        const auto it = pair_of.find(in.t_index);
        if (it == pair_of.end()) return out;
        const auto [lo, hi] = it->second;
        std::erase_if(out, [lo, hi](const auto &wm) { return wm.first.t_index != lo && wm.first.t_index != hi; });
        return out;
    };
    return ch;
}

/// Frequency-blind time-bin distribution of one photon launched in a mode.
inline std::map<std::int64_t, double> single_photon_times(const PhotonChannel &ch, const TimeFreqMode &in) {
    std::map<std::int64_t, WeightedModes> by_t;
    for (const auto &wm : ch.map(in)) by_t[wm.first.t_index].push_back(wm);
    std::map<std::int64_t, double> out;
    for (const auto &[t, list] : by_t) {
        double p = 0.0;
        for (const auto &[ma, a] : list)
            for (const auto &[mb, b] : list) p += (a * std::conj(b)).real() * ch.gram(ma.f_index - mb.f_index);
        out[t] = p;
    }
    return out;
}

inline double cell_weight(std::int64_t cell, std::int64_t t, double q, double w, double sigma, double offset) {
    const double d = static_cast<double>(cell - t) * q - offset;
    if (sigma == 0.0) return (d > -w && d <= w) ? 1.0 : 0.0;
    const double s = sigma * std::numbers::sqrt2;
    return 0.5 * (std::erfc(-(d + w) / s) - std::erfc(-(d - w) / s));
}

}  // namespace detail

/**
 * Detection probabilities per signal × idler cell for one joint setting,
 * including noise, jitter, detector efficiency and dark coincidences.
 */
inline CellGrid joint_cell_probabilities(const JointTwoPhotonState &state, const JointSetting &setting,
                                         const DetectorModel &detector, const MeasurementModel &model,
                                         double signal_offset_ps = 0.0, double idler_offset_ps = 0.0) {
    detector.validate();
    model.validate();
    const ModeGrid &grid = state.grid();
    const auto cs = detail::photon_channel(setting.signal, model, grid);
    const auto ci = detail::photon_channel(setting.idler, model, grid);

    // time-bin probabilities before detection
    std::map<std::pair<std::int64_t, std::int64_t>, double> pt;
    if (model.white_noise < 1.0) {
        const auto out = apply_single_photon_map(apply_single_photon_map(state, Photon::Signal, cs.map), Photon::Idler,
                                                 ci.map);
        std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::pair<ModePair, Amplitude>>> groups;
        for (const auto &[mp, a] : out.amplitudes()) groups[{mp.signal.t_index, mp.idler.t_index}].emplace_back(mp, a);
        for (const auto &[key, list] : groups) {
            double p = 0.0;
            for (const auto &[ma, a] : list) {
                for (const auto &[mb, b] : list) {
                    p += (a * std::conj(b)).real() * cs.gram(ma.signal.f_index - mb.signal.f_index) *
                         ci.gram(ma.idler.f_index - mb.idler.f_index);
                }
            }
            pt[key] += (1.0 - model.white_noise) * p;
        }
    }
    if (model.white_noise > 0.0) {
        const auto bins = default_layout(model.levels).t_indices(grid);
        const double k2 = static_cast<double>(bins.size() * bins.size());
        double norm = state.sum_probability();
        for (auto bs : bins) {
            const auto ds = detail::single_photon_times(cs, TimeFreqMode{bs, 0});
            for (auto bi : bins) {
                const auto di = detail::single_photon_times(ci, TimeFreqMode{bi, 0});
                for (const auto &[ts, ps] : ds)
                    for (const auto &[ti, pi] : di) pt[{ts, ti}] += model.white_noise * norm / k2 * ps * pi;
            }
        }
    }

    std::int64_t lo = 0;
    std::int64_t hi = 0;
    bool first = true;
    for (const auto &[key, p] : pt) {
        const std::int64_t a = std::min(key.first, key.second);
        const std::int64_t b = std::max(key.first, key.second);
        lo = first ? a : std::min(lo, a);
        hi = first ? b : std::max(hi, b);
        first = false;
    }
    for (auto b : default_layout(model.levels).t_indices(grid)) {
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    const double q = grid.time_quantum_ps;
    const double reach = std::max({std::abs(signal_offset_ps), std::abs(idler_offset_ps), 0.0}) +
                         8.0 * std::max(detector.sigma_ps(Photon::Signal), detector.sigma_ps(Photon::Idler)) +
                         detector.window_half_ps;
    const auto margin = static_cast<std::int64_t>(std::ceil(reach / q));
    CellGrid g;
    g.cell_lo = lo - margin;
    g.cells = static_cast<std::size_t>(hi - lo + 2 * margin + 1);
    g.values.assign(g.cells * g.cells, 0.0);

    const double w = detector.window_half_ps;
    const double sig_s = detector.sigma_ps(Photon::Signal);
    const double sig_i = detector.sigma_ps(Photon::Idler);
    const double eff = detector.efficiency * detector.efficiency;
    for (const auto &[key, p] : pt) {
        if (p == 0.0) continue;
        for (std::size_t s = 0; s < g.cells; ++s) {
            const double ws = detail::cell_weight(g.cell_lo + static_cast<std::int64_t>(s), key.first, q, w, sig_s,
                                                  signal_offset_ps);
            if (ws < 1e-300) continue;
            for (std::size_t i = 0; i < g.cells; ++i) {
                const double wi = detail::cell_weight(g.cell_lo + static_cast<std::int64_t>(i), key.second, q, w,
                                                      sig_i, idler_offset_ps);
                g.values[s * g.cells + i] += eff * p * ws * wi;
            }
        }
    }
    if (detector.dark_fraction > 0.0) {
        const double add = detector.dark_fraction * g.total() / static_cast<double>(g.values.size());
        for (double &v : g.values) v += add;
    }
    return g;
}

/**
 * One histogram per joint setting of the schedule. Sampled counts are Poisson
 * draws with mean pairs_per_setting · probability, seeded per setting; exact
 * mode returns the means.
 */
inline std::vector<JointTemporalIntensity> sample_coincidences(const JointTwoPhotonState &state,
                                                               const SegmentSchedule &schedule,
                                                               const DetectorModel &detector,
                                                               const MeasurementModel &model,
                                                               const SamplingOptions &sampling, std::uint64_t seed) {
    if (sampling.pairs_per_setting == 0) throw Error(ErrorCode::InvalidArgument, "pairs_per_setting must be positive");
    const auto bins = default_layout(model.levels).t_indices(state.grid());
    std::vector<JointTemporalIntensity> out;
    std::uint64_t index = 0;
    for (const auto &joint : schedule.joint_settings()) {
        JointTemporalIntensity h;
        h.joint = joint;
        h.orthogonal_cells = bins;
        h.counts = joint_cell_probabilities(state, joint, detector, model, sampling.signal_offset_ps,
                                            sampling.idler_offset_ps);
        const double n = static_cast<double>(sampling.pairs_per_setting);
        if (sampling.exact) {
            for (double &v : h.counts.values) v *= n;
        } else {
            std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(index)));
            for (double &v : h.counts.values) {
                const double mean = v * n;
                v = mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(rng)) : 0.0;
            }
        }
        out.push_back(std::move(h));
        ++index;
    }
    return out;
}

/**
 * Outcome digits (outermost level first) read from a detection at a layout
 * bin under a setting; nullopt for cells outside the layout.
 */
inline std::optional<Bits> photon_outcome(const BeamSplitterSetting &setting, const LevelSpec &levels,
                                          const ModeGrid &grid, std::int64_t t_index) {
    const BinLayout layout = default_layout(levels);
    const auto t_idx = layout.t_indices(grid);
    for (std::size_t b = 0; b < t_idx.size(); ++b) {
        if (t_idx[b] != t_index) continue;
        Bits bits = bin_to_bits(layout, b, levels.arity);
        if (setting.kind != SettingKind::Z) {
            const std::size_t li = *levels.index_of(setting.level);
            bits[li] = 1 - bits[li];
        }
        return bits;
    }
    return std::nullopt;
}

/// Operator letter per qubit (T_s, T_i, t_s, t_i) measured by a joint setting.
inline std::string basis_key(const JointSetting &joint, const LevelSpec &levels) {
    if (levels.size() != 2) throw Error(ErrorCode::UnsupportedLevels, "basis keys are defined for two levels");
    auto letter = [&](const BeamSplitterSetting &s, std::size_t level) {
        if (s.kind == SettingKind::Z || s.level != levels.levels[level].name) return 'Z';
        return s.kind == SettingKind::X ? 'X' : 'R';
    };
    return {letter(joint.signal, 0), letter(joint.idler, 0), letter(joint.signal, 1), letter(joint.idler, 1)};
}

struct BasisProjections {
    std::string key;      // e.g. "ZZXX"
    std::string setting;  // schedule name of the source histogram
    std::array<double, 16> raw{};
    double correction = 1.0;  // applied to raw before normalization
    std::array<double, 16> normalized{};
};

struct ProjectionSet {
    std::vector<BasisProjections> bases;

    const BasisProjections *find(const std::string &key) const {
        for (const auto &b : bases)
            if (b.key == key) return &b;
        return nullptr;
    }
};

inline constexpr std::array<const char *, 3> kWitnessBases{"ZZZZ", "ZZXX", "XXZZ"};

/// Renormalizes a 16-outcome count vector; throws InvalidArgument on zero total.
inline std::array<double, 16> normalize_outcomes(const std::array<double, 16> &raw) {
    double total = 0.0;
    for (double v : raw) total += v;
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "basis has no counts");
    std::array<double, 16> out{};
    for (std::size_t k = 0; k < 16; ++k) out[k] = raw[k] / total;
    return out;
}

/**
 * 16-outcome projections per X/Z joint setting, read from the orthogonal
 * cells only. Counts of each Z-measured photon are scaled by the beam-splitter
 * efficiency before normalization. Throws MissingBasis when one of the three
 * witness bases is absent.
 */
inline ProjectionSet extract_projections(const std::vector<JointTemporalIntensity> &histograms,
                                         const LevelSpec &levels, const ModeGrid &grid) {
    if (levels.size() != 2) throw Error(ErrorCode::UnsupportedLevels, "projections are defined for two levels");
    const double eta = efficiency(solve_balanced_depth());
    ProjectionSet out;
    for (const auto &h : histograms) {
        if (h.joint.signal.kind == SettingKind::RotatedXY || h.joint.idler.kind == SettingKind::RotatedXY) continue;
        BasisProjections b;
        b.key = basis_key(h.joint, levels);
        b.setting = h.joint.name;
        for (auto ts : h.orthogonal_cells) {
            const auto bs = photon_outcome(h.joint.signal, levels, grid, ts);
            for (auto ti : h.orthogonal_cells) {
                const auto bi = photon_outcome(h.joint.idler, levels, grid, ti);
                if (!bs || !bi) continue;
                const std::size_t idx = static_cast<std::size_t>((*bs)[0] * 8 + (*bi)[0] * 4 + (*bs)[1] * 2 + (*bi)[1]);
                b.raw[idx] += h.at(ts, ti);
            }
        }
        if (h.joint.signal.kind == SettingKind::Z) b.correction *= eta;
        if (h.joint.idler.kind == SettingKind::Z) b.correction *= eta;
        std::array<double, 16> scaled{};
        for (std::size_t k = 0; k < 16; ++k) scaled[k] = b.raw[k] * b.correction;
        b.normalized = normalize_outcomes(scaled);
        out.bases.push_back(std::move(b));
    }
    for (const char *key : kWitnessBases) {
        if (!out.find(key)) throw Error(ErrorCode::MissingBasis, std::string("no histogram measures basis ") + key);
    }
    return out;
}

struct OutcomeCell {
    std::string setting;
    Photon photon = Photon::Signal;
    std::int64_t t_index = 0;
    Bits bits;
};

/// Cell-to-outcome table of every schedule entry, restricted to layout bins.
inline std::vector<OutcomeCell> outcome_table(const SegmentSchedule &schedule, const LevelSpec &levels,
                                              const ModeGrid &grid) {
    const auto bins = default_layout(levels).t_indices(grid);
    std::vector<OutcomeCell> out;
    for (const auto &p : schedule.pairing) {
        for (Photon ph : {Photon::Signal, Photon::Idler}) {
            const auto &s = ph == Photon::Signal ? p.joint.signal : p.joint.idler;
            for (auto t : bins) out.push_back({p.name, ph, t, *photon_outcome(s, levels, grid, t)});
        }
    }
    return out;
}

}  // namespace tbc
