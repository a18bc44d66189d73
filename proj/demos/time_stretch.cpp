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

// Continuous-field CPM: copy positions and the visibility bound versus dispersion.

#include <cstdio>

#include "tbcluster/cpm.hpp"
#include "tbcluster/waveform.hpp"

int main() {
    const double g = tbc::solve_balanced_depth();
    std::printf("balance depth g* = %.6f, efficiency %.4f\n", g, tbc::efficiency(g));
    const std::size_t n = 16384;
    const auto pulse = tbc::gaussian_pulse(n, 1.0, -0.5 * static_cast<double>(n), 0.0, 37.0, 0.0);
    for (double rf : {1.25, 3.75}) {
        const double omega = tbc::angular_frequency(rf);
        const auto out = tbc::cpm_continuous(pulse, tbc::ChirpSpec{10.0}, g, omega, 0.0);
        const double dt = tbc::ChirpSpec{10.0}.beta2() * omega * 1e-12;
        std::printf("%.2f GHz: copies at %+.2f / %+.2f ps\n", rf, tbc::intensity_peak(out, -1.5 * dt, -0.5 * dt),
                    tbc::intensity_peak(out, 0.5 * dt, 1.5 * dt));
    }
    std::printf("dispersion  V(100 ps)  V(300 ps)\n");
    const std::vector<double> disp{2, 5, 10, 20, 50};
    const auto rows = tbc::visibility_scan(disp, {100.0, 300.0}, 37.0);
    for (std::size_t k = 0; k < disp.size(); ++k) {
        std::printf("%8.0f    %.4f     %.4f\n", disp[k], rows[k].visibility, rows[disp.size() + k].visibility);
    }
    return 0;
}
