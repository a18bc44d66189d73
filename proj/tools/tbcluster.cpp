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

// Command-line front end: generate, transmit, measure, witness, fringe,
// visibility, drift and capacity.
//
// Exit codes: 0 success, 1 simulation error, 2 configuration or usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "svg.hpp"
#include "tbcluster/analysis.hpp"
#include "tbcluster/channel.hpp"
#include "tbcluster/detection.hpp"
#include "tbcluster/json_io.hpp"
#include "tbcluster/run_config.hpp"
#include "tbcluster/source.hpp"
#include "tbcluster/waveform.hpp"

namespace fs = std::filesystem;

namespace {

using tbc::ojson;

struct Context {
    tbc::RunConfig cfg;
    std::string command;
    bool svg = false;
    std::string hash;

    fs::path path(const std::string &name) const { return fs::path(cfg.out) / name; }

    std::string csv_header() const {
        return "# tbcluster " + command + " config_hash=" + hash + " seed=" + std::to_string(cfg.seed) + "\n";
    }

    ojson json_header() const {
        ojson j;
        j["command"] = command;
        j["config_hash"] = hash;
        j["seed"] = cfg.seed;
        return j;
    }

    void write_json(const std::string &name, const ojson &j) const {
        tbc::write_file_atomic(path(name), j.dump(2) + "\n");
    }

    void write_csv(const std::string &name, const std::string &columns, const std::string &rows) const {
        tbc::write_file_atomic(path(name), csv_header() + columns + "\n" + rows);
    }
};

std::string f(double v) { return tbc::fmt_double(v); }

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

tbc::JointTwoPhotonState generated(const Context &c) {
    return tbc::generate_pair_state(c.cfg.train, tbc::default_layout(c.cfg.levels), c.cfg.grid);
}

struct Transmitted {
    tbc::TransmitResult result;
    std::optional<tbc::DriftTrace> drift;
};

Transmitted transmitted(const Context &c) {
    const auto &ch = c.cfg.channel;
    Transmitted t;
    if (ch.apply_drift) t.drift = tbc::simulate_drift(ch.link, ch.duration_s, ch.temperature, c.cfg.seed);
    t.result = tbc::transmit(generated(c), ch.link, t.drift ? &*t.drift : nullptr, ch.transmit_time_s);
    return t;
}

tbc::SamplingOptions sampling(const Context &c, double offset_ps) {
    tbc::SamplingOptions so;
    so.pairs_per_setting = c.cfg.detection.pairs_per_setting;
    so.exact = c.cfg.detection.exact;
    so.signal_offset_ps = offset_ps;
    so.idler_offset_ps = offset_ps;
    return so;
}

std::string outcome_bits(std::size_t k) {
    std::string s;
    for (int b = 3; b >= 0; --b) s += ((k >> b) & 1U) ? '1' : '0';
    return s;
}

int cmd_generate(const Context &c) {
    const auto state = generated(c);
    const auto check = tbc::is_cluster_state(state, tbc::default_layout(c.cfg.levels));
    ojson j = c.json_header();
    j["fidelity"] = check.fidelity;
    j["is_cluster"] = check.is_cluster;
    j["state"] = tbc::state_to_json(state);
    c.write_json("state.json", j);
    std::cout << "fidelity " << fixed(check.fidelity, 6) << "\n";
    if (!check.is_cluster) std::cerr << "warning: generated state is not the reference cluster state\n";
    return 0;
}

int cmd_transmit(const Context &c) {
    const auto t = transmitted(c);
    const auto &link = c.cfg.channel.link;
    ojson j = c.json_header();
    j["transmission"] = link.transmission();
    j["loss_db"] = link.length_km == 0.0 ? 0.0 : link.loss_db + link.compensator_loss_db;
    j["net_dispersion_ps_per_nm"] = link.dispersion_ps_per_nm + link.compensator_dispersion_ps_per_nm;
    j["arrival_offset_ps"] = t.result.arrival_offset_ps;
    j["drift_peak_bound_ps"] = t.drift ? t.drift->peak_bound_ps : 0.0;
    j["bin_assignment_corrupted"] =
        tbc::bin_assignment_corrupted(t.result.arrival_offset_ps, tbc::default_layout(c.cfg.levels));
    j["state"] = tbc::state_to_json(t.result.state);
    c.write_json("transmitted.json", j);
    std::cout << "transmission " << fixed(link.transmission(), 5) << ", arrival offset "
              << fixed(t.result.arrival_offset_ps, 3) << " ps\n";
    return 0;
}

std::vector<tbc::JointTemporalIntensity> measure(const Context &c, const tbc::JointTwoPhotonState &state,
                                                 const tbc::SamplingOptions &so) {
    const auto schedule = tbc::build_default_schedule(c.cfg.levels, c.cfg.detection.idler_offset);
    return tbc::sample_coincidences(state, schedule, c.cfg.detection.detector, c.cfg.measurement_model(), so,
                                    c.cfg.seed);
}

int cmd_measure(const Context &c) {
    const auto t = transmitted(c);
    const auto schedule = tbc::build_default_schedule(c.cfg.levels, c.cfg.detection.idler_offset);
    const auto hists = measure(c, t.result.state, sampling(c, t.result.arrival_offset_ps));
    std::string rows;
    ojson hj = c.json_header();
    hj["histograms"] = ojson::array();
    for (const auto &h : hists) {
        ojson e;
        e["setting"] = h.joint.name;
        e["label"] = h.joint.label();
        e["basis"] = tbc::basis_key(h.joint, c.cfg.levels);
        e["cell_lo"] = h.counts.cell_lo;
        e["cells"] = h.counts.cells;
        e["ancillary"] = h.ancillary();
        e["counts"] = h.counts.values;
        hj["histograms"].push_back(e);
        for (std::size_t s = 0; s < h.counts.cells; ++s) {
            for (std::size_t i = 0; i < h.counts.cells; ++i) {
                const double v = h.counts.values[s * h.counts.cells + i];
                if (v == 0.0) continue;
                rows += h.joint.name + "," + std::to_string(h.counts.cell_lo + static_cast<std::int64_t>(s)) + "," +
                        std::to_string(h.counts.cell_lo + static_cast<std::int64_t>(i)) + "," + f(v) + "\n";
            }
        }
    }
    c.write_csv("histograms.csv", "setting,s_bin,i_bin,counts", rows);
    c.write_json("histograms.json", hj);

    ojson sj = c.json_header();
    sj["frame_period_ns"] = schedule.frame_period_ns;
    sj["segment_length_ns"] = schedule.segment_length_ns;
    sj["entries"] = ojson::array();
    for (const auto &e : schedule.entries) {
        sj["entries"].push_back(
            {{"segment", e.segment}, {"photon", tbc::photon_name(e.photon)}, {"setting", e.setting.label()}});
    }
    sj["pairing"] = ojson::array();
    for (const auto &p : schedule.pairing) {
        sj["pairing"].push_back({{"name", p.name},
                                 {"signal_segment", p.signal_segment},
                                 {"idler_segment", p.idler_segment},
                                 {"joint_setting", p.joint.label()},
                                 {"basis", tbc::basis_key(p.joint, c.cfg.levels)}});
    }
    c.write_json("schedule.json", sj);

    ojson oj = c.json_header();
    oj["cells"] = ojson::array();
    for (const auto &cell : tbc::outcome_table(schedule, c.cfg.levels, c.cfg.grid)) {
        oj["cells"].push_back({{"setting", cell.setting},
                               {"photon", tbc::photon_name(cell.photon)},
                               {"t_index", cell.t_index},
                               {"bits", cell.bits}});
    }
    c.write_json("outcome_table.json", oj);
    std::cout << hists.size() << " joint settings measured\n";
    return 0;
}

int cmd_witness(const Context &c) {
    const auto t = transmitted(c);
    Context cc = c;
    if (c.cfg.analysis.target_stderr > 0.0) {
        const auto schedule = tbc::build_default_schedule(c.cfg.levels, c.cfg.detection.idler_offset);
        cc.cfg.detection.pairs_per_setting =
            tbc::pairs_for_target_stderr(t.result.state, schedule, c.cfg.detection.detector,
                                         c.cfg.measurement_model(), c.cfg.analysis.target_stderr, c.cfg.seed);
    }
    const auto hists = measure(cc, t.result.state, sampling(cc, t.result.arrival_offset_ps));
    const auto set = tbc::extract_projections(hists, c.cfg.levels, c.cfg.grid);
    auto report = tbc::witness(set);
    tbc::MonteCarloOptions mo;
    mo.samples = c.cfg.analysis.mc_samples;
    mo.bins = c.cfg.analysis.histogram_bins;
    const auto mc = tbc::monte_carlo_error(set, c.cfg.seed, mo);
    report.stderr_ = mc.stderr_;

    std::string rows;
    for (const auto &b : set.bases) {
        for (std::size_t k = 0; k < 16; ++k) {
            rows += b.key + "," + b.setting + "," + outcome_bits(k) + "," + f(b.raw[k]) + "," + f(b.normalized[k]) + "\n";
        }
    }
    c.write_csv("projections.csv", "basis,setting,outcome,raw,normalized", rows);

    std::string hist;
    const double bw = mc.histogram.bin_width();
    for (std::size_t k = 0; k < mc.histogram.counts.size(); ++k) {
        hist += f(mc.histogram.lo + bw * static_cast<double>(k)) + "," +
                f(mc.histogram.lo + bw * static_cast<double>(k + 1)) + "," + std::to_string(mc.histogram.counts[k]) +
                "\n";
    }
    c.write_csv("witness_hist.csv", "w_lo,w_hi,count", hist);

    ojson j = c.json_header();
    j["pairs_per_setting"] = cc.cfg.detection.pairs_per_setting;
    j["exact"] = c.cfg.detection.exact;
    ojson st;
    ojson pass;
    for (std::size_t k = 0; k < 6; ++k) {
        st[tbc::cluster_stabilizers()[k].ops] = report.expectations[k];
        pass[tbc::cluster_stabilizers()[k].ops] = report.threshold_pass[k];
    }
    j["stabilizers"] = st;
    j["threshold"] = tbc::kStabilizerThreshold;
    j["threshold_pass"] = pass;
    j["all_above_threshold"] = report.all_pass;
    j["mean_above_threshold"] = report.mean_pass;
    j["witness"] = report.witness;
    j["stderr"] = report.stderr_;
    j["significance"] = report.stderr_ > 0.0 ? std::abs(report.witness) / report.stderr_ : 0.0;
    j["fidelity_bound"] = report.fidelity_bound;
    j["mc_samples"] = mc.samples;
    j["mc_mean"] = mc.mean;
    c.write_json("witness.json", j);
    std::cout << "W = " << fixed(report.witness, 4) << " +/- " << fixed(report.stderr_, 4) << ", F >= "
              << fixed(report.fidelity_bound, 4) << "\n";
    return 0;
}

int cmd_fringe(const Context &c) {
    const auto t = transmitted(c);
    auto model = c.cfg.measurement_model();
    if (!c.cfg.analysis.fringe_penalty.empty()) model.visibility_penalty = c.cfg.analysis.fringe_penalty;
    const auto alphas = tbc::uniform_alphas(c.cfg.analysis.fringe_points);
    const auto so = sampling(c, t.result.arrival_offset_ps);
    std::string rows;
    ojson j = c.json_header();
    j["fits"] = ojson::array();
    std::vector<tbc::tools::Series> series;
    std::uint64_t idx = 0;
    for (const auto &p : tbc::default_fringe_projections(c.cfg.levels)) {
        const auto fit = tbc::fringe_scan(t.result.state, p, alphas, c.cfg.detection.detector, model, so,
                                          tbc::detail::splitmix64(c.cfg.seed + idx++));
        for (std::size_t k = 0; k < alphas.size(); ++k) rows += p.name + "," + f(alphas[k]) + "," + f(fit.rates[k]) + "\n";
        j["fits"].push_back({{"projection", p.name},
                             {"k", fit.k},
                             {"visibility", fit.visibility},
                             {"phase_offset", fit.phase_offset},
                             {"best_k", fit.best_k},
                             {"best_visibility", fit.best_visibility},
                             {"k_mismatch", fit.k_mismatch},
                             {"chsh_pass", fit.chsh_pass}});
        std::cout << p.name << ": V = " << fixed(fit.visibility, 4) << (fit.chsh_pass ? " (CHSH pass)" : " (CHSH fail)")
                  << "\n";
        if (fit.k_mismatch) std::cerr << "warning: " << p.name << " fits better with k = " << fit.best_k << "\n";
        series.push_back({p.name, alphas, fit.rates});
    }
    j["chsh_threshold"] = tbc::kChshVisibility;
    c.write_csv("fringe.csv", "projection,alpha,rate", rows);
    c.write_json("fringe_fit.json", j);
    if (c.svg) tbc::write_file_atomic(c.path("fringe.svg"), tbc::tools::line_plot_svg("Fringes", "alpha (rad)", "rate", series));
    return 0;
}

int cmd_visibility(const Context &c) {
    const auto &w = c.cfg.waveform;
    if (w.dispersions_ns_per_nm.empty() || w.separations_ps.empty()) {
        throw tbc::ConfigError("waveform.dispersions_ns_per_nm and waveform.separations_ps must be nonempty");
    }
    tbc::VisibilityOptions opt;
    opt.dt_ps = w.dt_ps;
    opt.alpha_points = w.alpha_points;
    const auto rows = tbc::visibility_scan(w.dispersions_ns_per_nm, w.separations_ps, w.pulse_fwhm_ps, opt);
    std::string csv;
    ojson j = c.json_header();
    j["curves"] = ojson::array();
    std::vector<tbc::tools::Series> series;
    for (double sep : w.separations_ps) {
        tbc::tools::Series s{fixed(sep, 0) + " ps", {}, {}};
        ojson curve;
        curve["separation_ps"] = sep;
        curve["points"] = ojson::array();
        bool monotone = true;
        double last = -1.0;
        for (const auto &r : rows) {
            if (r.bin_separation_ps != sep) continue;
            const tbc::ChirpSpec chirp{r.dispersion_ns_per_nm, c.cfg.cpm.carrier_wavelength_nm};
            const double analytic =
                tbc::visibility_bound_analytic(w.pulse_fwhm_ps, tbc::omega_for_separation(sep, chirp));
            csv += f(r.dispersion_ns_per_nm) + "," + f(sep) + "," + f(r.visibility) + "," + f(analytic) + "\n";
            curve["points"].push_back(
                {{"dispersion_ns_per_nm", r.dispersion_ns_per_nm}, {"visibility", r.visibility}, {"analytic", analytic}});
            monotone = monotone && r.visibility >= last;
            last = r.visibility;
            s.x.push_back(r.dispersion_ns_per_nm);
            s.y.push_back(r.visibility);
            std::cout << "D = " << fixed(r.dispersion_ns_per_nm, 1) << " ns/nm, " << fixed(sep, 0)
                      << " ps: V = " << fixed(r.visibility, 4) << "\n";
        }
        curve["monotone"] = monotone;
        j["curves"].push_back(curve);
        series.push_back(std::move(s));
    }
    c.write_csv("visibility.csv", "dispersion_ns_per_nm,separation_ps,visibility,analytic", csv);
    c.write_json("visibility.json", j);
    if (c.svg) {
        tbc::write_file_atomic(c.path("visibility.svg"),
                               tbc::tools::line_plot_svg("Visibility bound", "dispersion (ns/nm)", "visibility", series));
    }
    return 0;
}

int cmd_drift(const Context &c) {
    const auto &ch = c.cfg.channel;
    const auto trace = tbc::simulate_drift(ch.link, ch.duration_s, ch.temperature, c.cfg.seed);
    const auto st = tbc::stabilize(trace, ch.stabilizer, tbc::detail::splitmix64(c.cfg.seed));
    std::string rows;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        rows += f(trace.times_s[k]) + "," + f(trace.offsets_ps[k]) + "," + f(st.corrections_ps[k]) + "," +
                f(st.residual.offsets_ps[k]) + "\n";
    }
    c.write_csv("drift.csv", "time_s,offset_ps,correction_ps,residual_ps", rows);
    const auto layout = tbc::default_layout(c.cfg.levels);
    ojson j = c.json_header();
    j["peak_bound_ps"] = trace.peak_bound_ps;
    j["max_abs_offset_ps"] = trace.max_abs();
    j["input_rms_ps"] = st.input_rms_ps;
    j["residual_rms_ps"] = st.rms_ps;
    j["epochs"] = st.epochs;
    j["uncorrected_corrupts_bins"] = tbc::bin_assignment_corrupted(trace.max_abs(), layout);
    c.write_json("drift.json", j);
    if (c.svg) {
        std::vector<double> hours;
        for (double t : trace.times_s) hours.push_back(t / 3600.0);
        tbc::write_file_atomic(
            c.path("drift.svg"),
            tbc::tools::line_plot_svg("Arrival-time drift", "time (h)", "offset (ps)",
                                 {{"uncorrected", hours, trace.offsets_ps}, {"stabilized", hours, st.residual.offsets_ps}}));
    }
    std::cout << "peak bound " << fixed(trace.peak_bound_ps, 1) << " ps, residual RMS " << fixed(st.rms_ps, 3)
              << " ps\n";
    return 0;
}

int cmd_capacity(const Context &c) {
    const auto &a = c.cfg.analysis;
    const double rate = tbc::multiplex_capacity(a.capacity_bandwidth_ghz, a.capacity_channel_width_ghz,
                                                a.capacity_stretched_bin_ns);
    ojson j = c.json_header();
    j["bandwidth_ghz"] = a.capacity_bandwidth_ghz;
    j["channel_width_ghz"] = a.capacity_channel_width_ghz;
    j["stretched_bin_ns"] = a.capacity_stretched_bin_ns;
    j["channels"] = std::floor(a.capacity_bandwidth_ghz / a.capacity_channel_width_ghz + 1e-12);
    j["qubits_per_second"] = rate;
    c.write_json("capacity.json", j);
    std::cout << fixed(rate / 1e9, 3) << " GigaQubits/s\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Multi-level time-bin cluster-state simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::string preset_name = "paper-default";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool exact = false;
    bool svg = false;
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "ideal | paper-default | paper-calibrated");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--out", out, "output directory");
    app.add_flag("--exact", exact, "expected counts instead of sampled counts");
    app.add_flag("--svg", svg, "also write SVG plots");
    struct Command {
        const char *name;
        const char *help;
        int (*fn)(const Context &);
    };
    const std::vector<Command> commands{
        {"generate", "build the two-photon state and check it against the cluster state", cmd_generate},
        {"transmit", "apply link loss and the drift-induced arrival offset", cmd_transmit},
        {"measure", "simulate coincidence histograms for every joint setting", cmd_measure},
        {"witness", "stabilizers, witness, Monte-Carlo error and fidelity bound", cmd_witness},
        {"fringe", "two-qubit interference scans with visibility fits", cmd_fringe},
        {"visibility", "continuous-field visibility bound versus dispersion", cmd_visibility},
        {"drift", "thermal timing drift and stabilized residual", cmd_drift},
        {"capacity", "frequency-multiplexed qubit rate", cmd_capacity}};
    for (const auto &c : commands) app.add_subcommand(c.name, c.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Context c;
    int (*run)(const Context &) = nullptr;
    for (const auto &cmd : commands) {
        if (app.got_subcommand(cmd.name)) {
            c.command = cmd.name;
            run = cmd.fn;
        }
    }
    try {
        c.cfg = tbc::preset(preset_name);
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            ojson j;
            try {
                j = ojson::parse(in);
            } catch (const nlohmann::json::exception &e) {
                throw tbc::ConfigError(std::string("cannot parse ") + config_path + ": " + e.what());
            }
            tbc::apply_config_json(c.cfg, j);
        }
        if (seed) c.cfg.seed = *seed;
        if (out) c.cfg.out = *out;
        if (exact) c.cfg.detection.exact = true;
        c.cfg.validate();
        c.svg = svg;
        c.hash = tbc::hex64(tbc::config_hash(c.cfg));
    } catch (const tbc::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        return run(c);
    } catch (const tbc::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const tbc::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
