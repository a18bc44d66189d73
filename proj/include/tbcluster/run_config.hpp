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
 * Run configuration: one JSON section per module, strict key checking,
 * built-in presets and a canonical dump used for hashing.
 *
 * Presets:
 *   ideal             noiseless, jitter-free detector, unit visibilities
 *   paper-default     published hardware parameters, no added noise
 *   paper-calibrated  white noise 0.0667 on a jitter-free detector, witness
 *                     statistics sized for σ(W) = 0.04, fringe penalties
 *                     0.95 (T) and 0.99 (t)
 */

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbcluster/channel.hpp"
#include "tbcluster/cpm.hpp"
#include "tbcluster/detection.hpp"
#include "tbcluster/encoding.hpp"
#include "tbcluster/json_io.hpp"
#include "tbcluster/source.hpp"

namespace tbc {

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct WaveformConfig {
    double pulse_fwhm_ps = 37.0;
    std::vector<double> dispersions_ns_per_nm{2.0, 5.0, 10.0, 20.0, 30.0};
    std::vector<double> separations_ps{100.0, 300.0};
    double dt_ps = 1.0;
    int alpha_points = 16;
};

struct ChannelConfig {
    FiberLink link{};
    TemperatureModel temperature{};
    StabilizerPolicy stabilizer{};
    double duration_s = 86400.0;
    double transmit_time_s = 0.0;
    bool apply_drift = false;
};

struct DetectionConfig {
    DetectorModel detector{};
    std::uint64_t pairs_per_setting = 1000000;
    double white_noise = 0.0;
    std::map<std::string, double> visibility_penalty;
    bool cross_pair_scattering = false;
    std::size_t idler_offset = 5;
    bool exact = false;
};

struct AnalysisConfig {
    std::uint64_t mc_samples = 1000000;
    std::size_t histogram_bins = 60;
    double target_stderr = 0.0;  // > 0 sizes pairs_per_setting by a pilot run
    std::size_t fringe_points = 16;
    std::map<std::string, double> fringe_penalty;  // replaces the detection penalties for fringe scans
    double capacity_bandwidth_ghz = 5000.0;
    double capacity_channel_width_ghz = 25.0;
    double capacity_stretched_bin_ns = 2.0;
};

struct RunConfig {
    std::uint64_t seed = 1;
    std::string out = "out";
    ModeGrid grid{};
    LevelSpec levels = LevelSpec::paper_default();
    ExcitationTrain train{};
    CpmSettings cpm{};
    WaveformConfig waveform{};
    ChannelConfig channel{};
    DetectionConfig detection{};
    AnalysisConfig analysis{};

    MeasurementModel measurement_model() const {
        MeasurementModel m;
        m.levels = levels;
        m.cpm_base = cpm;
        m.visibility_penalty = detection.visibility_penalty;
        m.white_noise = detection.white_noise;
        m.cross_pair_scattering = detection.cross_pair_scattering;
        return m;
    }

    /// Runs every module's validation; throws ConfigError.
    void validate() const {
        try {
            grid.validate();
            const BinLayout layout = default_layout(levels);
            (void)layout.t_indices(grid);
            train.validate();
            if (train.times_ps.size() != layout.count()) {
                throw ConfigError("source.phases_rad needs one entry per bin (" + std::to_string(layout.count()) + ")");
            }
            CpmSettings probe = cpm;
            probe.g = 1.0;
            probe.validate();
            channel.link.validate();
            channel.temperature.validate();
            channel.stabilizer.validate();
            if (!(channel.duration_s > 0.0)) throw ConfigError("channel.duration_s must be positive");
            detection.detector.validate();
            measurement_model().validate();
            if (detection.pairs_per_setting == 0) throw ConfigError("detection.pairs_per_setting must be positive");
            if (analysis.mc_samples == 0 || analysis.histogram_bins == 0) {
                throw ConfigError("analysis.mc_samples and analysis.histogram_bins must be positive");
            }
            if (!(analysis.target_stderr >= 0.0)) throw ConfigError("analysis.target_stderr must be nonnegative");
            if (analysis.fringe_points < 8) throw ConfigError("analysis.fringe_points must be at least 8");
            for (const auto &[name, v] : analysis.fringe_penalty) {
                (void)levels.level(name);
                if (!(v > 0.0 && v <= 1.0)) throw ConfigError("analysis.fringe_penalty values must lie in (0, 1]");
            }
            if (!(waveform.pulse_fwhm_ps > 0.0) || !(waveform.dt_ps > 0.0)) {
                throw ConfigError("waveform.pulse_fwhm_ps and waveform.dt_ps must be positive");
            }
        } catch (const Error &e) {
            throw ConfigError(e.what());
        }
    }
};

namespace detail {

/// Reads known keys from one JSON object and rejects the rest.
class Section {
  public:
    Section(const ojson &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_ + " must be an object");
    }

    template <class T>
    void get(const char *key, T &out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception &) {
            throw ConfigError(path_ + "." + key + " has the wrong type");
        }
    }

    const ojson *child(const char *key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto &[k, v] : j_.items()) {
            if (!seen_.count(k)) throw ConfigError("unknown key " + path_ + "." + k);
        }
    }

  private:
    const ojson &j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

/// Overlays a JSON document onto cfg.
inline void apply_config_json(RunConfig &cfg, const ojson &j) {
    detail::Section root(j, "config");
    root.get("seed", cfg.seed);
    root.get("out", cfg.out);
    if (const auto *g = root.child("grid")) {
        detail::Section s(*g, "grid");
        s.get("time_quantum_ps", cfg.grid.time_quantum_ps);
        s.get("freq_quantum_ghz", cfg.grid.freq_quantum_ghz);
        s.get("time_origin_ps", cfg.grid.time_origin_ps);
        s.finish();
    }
    if (const auto *e = root.child("encoding")) {
        detail::Section s(*e, "encoding");
        if (const auto *lv = s.child("levels")) {
            if (!lv->is_array()) throw ConfigError("encoding.levels must be an array");
            cfg.levels.levels.clear();
            for (const auto &l : *lv) {
                detail::Section ls(l, "encoding.levels[]");
                Level level;
                ls.get("name", level.name);
                ls.get("shift_ps", level.shift_ps);
                ls.get("rf_ghz", level.rf_ghz);
                ls.finish();
                cfg.levels.levels.push_back(level);
            }
        }
        s.finish();
    }
    if (const auto *src = root.child("source")) {
        detail::Section s(*src, "source");
        s.get("phases_rad", cfg.train.phases_rad);
        s.get("pulse_fwhm_ps", cfg.train.fwhm_ps);
        s.get("repetition_ns", cfg.train.repetition_ns);
        s.finish();
    }
    if (const auto *c = root.child("cpm")) {
        detail::Section s(*c, "cpm");
        s.get("dispersion_ns_per_nm", cfg.cpm.dispersion_ns_per_nm);
        s.get("carrier_wavelength_nm", cfg.cpm.carrier_wavelength_nm);
        s.get("truncation_order", cfg.cpm.truncation_order);
        s.finish();
    }
    if (const auto *w = root.child("waveform")) {
        detail::Section s(*w, "waveform");
        s.get("pulse_fwhm_ps", cfg.waveform.pulse_fwhm_ps);
        s.get("dispersions_ns_per_nm", cfg.waveform.dispersions_ns_per_nm);
        s.get("separations_ps", cfg.waveform.separations_ps);
        s.get("dt_ps", cfg.waveform.dt_ps);
        s.get("alpha_points", cfg.waveform.alpha_points);
        s.finish();
    }
    if (const auto *c = root.child("channel")) {
        detail::Section s(*c, "channel");
        auto &l = cfg.channel.link;
        s.get("length_km", l.length_km);
        s.get("loss_db", l.loss_db);
        s.get("dispersion_ps_per_nm", l.dispersion_ps_per_nm);
        s.get("compensator_dispersion_ps_per_nm", l.compensator_dispersion_ps_per_nm);
        s.get("compensator_loss_db", l.compensator_loss_db);
        s.get("thermal_sensitivity_ps_per_k_km", l.thermal_sensitivity_ps_per_k_km);
        s.get("residual_dispersion_ps_per_nm", l.residual_dispersion_ps_per_nm);
        s.get("duration_s", cfg.channel.duration_s);
        s.get("transmit_time_s", cfg.channel.transmit_time_s);
        s.get("apply_drift", cfg.channel.apply_drift);
        if (const auto *t = s.child("temperature")) {
            detail::Section ts(*t, "channel.temperature");
            ts.get("sd_k", cfg.channel.temperature.sd_k);
            ts.get("correlation_time_s", cfg.channel.temperature.correlation_time_s);
            ts.get("clip_k", cfg.channel.temperature.clip_k);
            ts.get("sample_interval_s", cfg.channel.temperature.sample_interval_s);
            ts.finish();
        }
        if (const auto *p = s.child("stabilizer")) {
            detail::Section ps(*p, "channel.stabilizer");
            ps.get("correction_interval_s", cfg.channel.stabilizer.correction_interval_s);
            ps.get("estimator_noise_ps", cfg.channel.stabilizer.estimator_noise_ps);
            ps.get("actuator_resolution_ps", cfg.channel.stabilizer.actuator_resolution_ps);
            ps.finish();
        }
        s.finish();
    }
    if (const auto *d = root.child("detection")) {
        detail::Section s(*d, "detection");
        s.get("pairs_per_setting", cfg.detection.pairs_per_setting);
        s.get("white_noise", cfg.detection.white_noise);
        s.get("visibility_penalty", cfg.detection.visibility_penalty);
        s.get("cross_pair_scattering", cfg.detection.cross_pair_scattering);
        s.get("idler_offset", cfg.detection.idler_offset);
        s.get("exact", cfg.detection.exact);
        if (const auto *det = s.child("detector")) {
            detail::Section ds(*det, "detection.detector");
            auto &m = cfg.detection.detector;
            ds.get("jitter_signal_ps", m.jitter_signal_ps);
            ds.get("jitter_idler_ps", m.jitter_idler_ps);
            ds.get("tdc_jitter_ps", m.tdc_jitter_ps);
            ds.get("window_half_ps", m.window_half_ps);
            ds.get("dark_fraction", m.dark_fraction);
            ds.get("efficiency", m.efficiency);
            ds.finish();
        }
        s.finish();
    }
    if (const auto *a = root.child("analysis")) {
        detail::Section s(*a, "analysis");
        s.get("mc_samples", cfg.analysis.mc_samples);
        s.get("histogram_bins", cfg.analysis.histogram_bins);
        s.get("target_stderr", cfg.analysis.target_stderr);
        s.get("fringe_points", cfg.analysis.fringe_points);
        s.get("fringe_penalty", cfg.analysis.fringe_penalty);
        s.get("capacity_bandwidth_ghz", cfg.analysis.capacity_bandwidth_ghz);
        s.get("capacity_channel_width_ghz", cfg.analysis.capacity_channel_width_ghz);
        s.get("capacity_stretched_bin_ns", cfg.analysis.capacity_stretched_bin_ns);
        s.finish();
    }
    root.finish();
    // pulse times follow the layout
    try {
        cfg.train.times_ps = default_layout(cfg.levels).positions_ps;
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
}

/// Canonical dump of every field, in a fixed order.
inline ojson config_to_json(const RunConfig &cfg) {
    ojson j;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out;
    j["grid"] = {{"time_quantum_ps", cfg.grid.time_quantum_ps},
                 {"freq_quantum_ghz", cfg.grid.freq_quantum_ghz},
                 {"time_origin_ps", cfg.grid.time_origin_ps}};
    ojson levels = ojson::array();
    for (const auto &l : cfg.levels.levels) levels.push_back({{"name", l.name}, {"shift_ps", l.shift_ps}, {"rf_ghz", l.rf_ghz}});
    j["encoding"] = {{"levels", levels}};
    j["source"] = {{"phases_rad", cfg.train.phases_rad},
                   {"pulse_fwhm_ps", cfg.train.fwhm_ps},
                   {"repetition_ns", cfg.train.repetition_ns}};
    j["cpm"] = {{"dispersion_ns_per_nm", cfg.cpm.dispersion_ns_per_nm},
                {"carrier_wavelength_nm", cfg.cpm.carrier_wavelength_nm},
                {"truncation_order", cfg.cpm.truncation_order}};
    j["waveform"] = {{"pulse_fwhm_ps", cfg.waveform.pulse_fwhm_ps},
                     {"dispersions_ns_per_nm", cfg.waveform.dispersions_ns_per_nm},
                     {"separations_ps", cfg.waveform.separations_ps},
                     {"dt_ps", cfg.waveform.dt_ps},
                     {"alpha_points", cfg.waveform.alpha_points}};
    const auto &l = cfg.channel.link;
    j["channel"] = {{"length_km", l.length_km},
                    {"loss_db", l.loss_db},
                    {"dispersion_ps_per_nm", l.dispersion_ps_per_nm},
                    {"compensator_dispersion_ps_per_nm", l.compensator_dispersion_ps_per_nm},
                    {"compensator_loss_db", l.compensator_loss_db},
                    {"thermal_sensitivity_ps_per_k_km", l.thermal_sensitivity_ps_per_k_km},
                    {"residual_dispersion_ps_per_nm", l.residual_dispersion_ps_per_nm},
                    {"duration_s", cfg.channel.duration_s},
                    {"transmit_time_s", cfg.channel.transmit_time_s},
                    {"apply_drift", cfg.channel.apply_drift},
                    {"temperature",
                     {{"sd_k", cfg.channel.temperature.sd_k},
                      {"correlation_time_s", cfg.channel.temperature.correlation_time_s},
                      {"clip_k", cfg.channel.temperature.clip_k},
                      {"sample_interval_s", cfg.channel.temperature.sample_interval_s}}},
                    {"stabilizer",
                     {{"correction_interval_s", cfg.channel.stabilizer.correction_interval_s},
                      {"estimator_noise_ps", cfg.channel.stabilizer.estimator_noise_ps},
                      {"actuator_resolution_ps", cfg.channel.stabilizer.actuator_resolution_ps}}}};
    const auto &d = cfg.detection.detector;
    j["detection"] = {{"pairs_per_setting", cfg.detection.pairs_per_setting},
                      {"white_noise", cfg.detection.white_noise},
                      {"visibility_penalty", cfg.detection.visibility_penalty},
                      {"cross_pair_scattering", cfg.detection.cross_pair_scattering},
                      {"idler_offset", cfg.detection.idler_offset},
                      {"exact", cfg.detection.exact},
                      {"detector",
                       {{"jitter_signal_ps", d.jitter_signal_ps},
                        {"jitter_idler_ps", d.jitter_idler_ps},
                        {"tdc_jitter_ps", d.tdc_jitter_ps},
                        {"window_half_ps", d.window_half_ps},
                        {"dark_fraction", d.dark_fraction},
                        {"efficiency", d.efficiency}}}};
    j["analysis"] = {{"mc_samples", cfg.analysis.mc_samples},
                     {"histogram_bins", cfg.analysis.histogram_bins},
                     {"target_stderr", cfg.analysis.target_stderr},
                     {"fringe_points", cfg.analysis.fringe_points},
                     {"fringe_penalty", cfg.analysis.fringe_penalty},
                     {"capacity_bandwidth_ghz", cfg.analysis.capacity_bandwidth_ghz},
                     {"capacity_channel_width_ghz", cfg.analysis.capacity_channel_width_ghz},
                     {"capacity_stretched_bin_ns", cfg.analysis.capacity_stretched_bin_ns}};
    return j;
}

/// The canonical dump without the output directory.
inline ojson canonical_config_json(const RunConfig &cfg) {
    ojson j = config_to_json(cfg);
    j.erase("out");
    return j;
}

inline std::uint64_t config_hash(const RunConfig &cfg) { return fnv1a64(canonical_config_json(cfg).dump()); }

inline const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{"ideal", "paper-default", "paper-calibrated"};
    return names;
}

/// Built-in preset; throws ConfigError for an unknown name.
inline RunConfig preset(const std::string &name) {
    RunConfig cfg;
    if (name == "paper-default") return cfg;
    if (name == "ideal") {
        cfg.detection.detector = DetectorModel::ideal();
        return cfg;
    }
    if (name == "paper-calibrated") {
        cfg.detection.detector = DetectorModel::ideal();
        cfg.detection.white_noise = 0.0667;
        cfg.analysis.target_stderr = 0.04;
        cfg.analysis.fringe_penalty = {{"T", 0.95}, {"t", 0.99}};
        return cfg;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace tbc
