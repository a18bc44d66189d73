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

// End-to-end run: cluster state, 25 km link, detection, witness and fringes.

#include <cmath>
#include <cstdio>

#include "tbcluster/analysis.hpp"
#include "tbcluster/channel.hpp"
#include "tbcluster/source.hpp"

int main() {
    const auto levels = tbc::LevelSpec::paper_default();
    const tbc::ModeGrid grid;
    const auto layout = tbc::default_layout(levels);
    const auto psi = tbc::cluster_state(layout, grid);
    std::printf("cluster state: %zu amplitudes, fidelity %.6f\n", psi.amplitudes().size(),
                tbc::is_cluster_state(psi, layout).fidelity);

    const tbc::FiberLink link;
    const auto drift = tbc::simulate_drift(link, 86400.0, tbc::TemperatureModel{}, 1);
    const auto sent = tbc::transmit(psi, link, &drift, 43200.0);
    std::printf("link: transmission %.4f, arrival offset at noon %.2f ps (bound %.1f ps)\n", link.transmission(),
                sent.arrival_offset_ps, drift.peak_bound_ps);
    const auto locked = tbc::stabilize(drift, tbc::StabilizerPolicy{}, 2);
    std::printf("stabilized residual RMS %.2f ps\n", locked.rms_ps);

    tbc::MeasurementModel model;
    model.white_noise = tbc::noise_for_witness(-0.80);
    tbc::SamplingOptions sampling;
    sampling.pairs_per_setting = 4000;
    const auto schedule = tbc::build_default_schedule(levels);
    const auto histograms =
        tbc::sample_coincidences(sent.state, schedule, tbc::DetectorModel::ideal(), model, sampling, 7);
    const auto projections = tbc::extract_projections(histograms, levels, grid);
    const auto report = tbc::witness(projections);
    const auto mc = tbc::monte_carlo_error(projections, 7);
    const auto terms = tbc::cluster_stabilizers();
    for (std::size_t k = 0; k < terms.size(); ++k) {
        std::printf("  <%s> = %+.3f%s\n", terms[k].ops.c_str(), report.expectations[k],
                    report.threshold_pass[k] ? "" : "  (below 2/3)");
    }
    std::printf("W = %.3f +/- %.3f (%.1f sigma), F >= %.3f\n", report.witness, mc.stderr_,
                std::abs(report.witness) / mc.stderr_, report.fidelity_bound);

    model.visibility_penalty = {{"T", 0.95}, {"t", 0.99}};
    sampling.pairs_per_setting = 1e6;
    for (const auto &proj : tbc::default_fringe_projections(levels)) {
        const auto fit = tbc::fringe_scan(psi, proj, tbc::uniform_alphas(16), tbc::DetectorModel::ideal(), model,
                                          sampling, 11);
        std::printf("fringe %s: V = %.3f%s\n", proj.name.c_str(), fit.visibility, fit.chsh_pass ? " (CHSH)" : "");
    }
    std::printf("capacity: %.0f GigaQubits/s\n", tbc::multiplex_capacity(5000.0, 25.0, 2.0) / 1e9);
    return 0;
}
