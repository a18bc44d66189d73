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
 * Gate-free cluster-state source. A train of excitation pulses with
 * per-pulse phases φ_k is frequency doubled (phases become 2φ_k) and pumps
 * pair generation, giving
 *     |ψ⟩ = K^{-1/2} Σ_k e^{2iφ_k} |k⟩_s |k⟩_i.
 * With phases (0, 0, 0, π/2) on four bins this is the two-photon,
 * four-qubit linear cluster state ½(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)
 * in qubit order (T_s, T_i, t_s, t_i).
 */

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "tbcluster/core_modes.hpp"
#include "tbcluster/encoding.hpp"
#include "tbcluster/error.hpp"

namespace tbc {

/// Physical signal-idler carrier separation attached to generated states.
inline constexpr double kSignalIdlerOffsetGhz = 600.0;

struct ExcitationTrain {
    std::vector<double> times_ps{0.0, 100.0, 300.0, 400.0};
    std::vector<double> phases_rad{0.0, 0.0, 0.0, std::numbers::pi / 2.0};
    double fwhm_ps = 37.0;
    double repetition_ns = 20.0;

    void validate() const {
        if (times_ps.size() != phases_rad.size()) {
            throw Error(ErrorCode::LengthMismatch, "pulse times and phases differ in length");
        }
        for (std::size_t k = 1; k < times_ps.size(); ++k) {
            if (!(times_ps[k] > times_ps[k - 1])) {
                throw Error(ErrorCode::InvalidArgument, "pulse times must be strictly increasing");
            }
        }
        if (!(fwhm_ps > 0.0) || !(repetition_ns > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "pulse width and repetition period must be positive");
        }
    }
};

inline double wrap_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) r += two_pi;
    // keep values that are 2π up to rounding at 0
    if (two_pi - r < 1e-12) r = 0.0;
    return r;
}

/// Pump phases after frequency doubling, 2φ_k mod 2π.
inline std::vector<double> shg_phases(const ExcitationTrain &train) {
    std::vector<double> out;
    out.reserve(train.phases_rad.size());
    for (double phi : train.phases_rad) out.push_back(wrap_phase(2.0 * phi));
    return out;
}

inline JointTwoPhotonState generate_pair_state(const ExcitationTrain &train, const BinLayout &layout,
                                               const ModeGrid &grid) {
    train.validate();
    if (train.times_ps.size() != layout.count()) {
        throw Error(ErrorCode::LayoutMismatch, "train has " + std::to_string(train.times_ps.size()) +
                                                   " pulses, layout has " + std::to_string(layout.count()) + " bins");
    }
    if (train.times_ps.empty()) throw Error(ErrorCode::LayoutMismatch, "empty pulse train");
    for (std::size_t k = 0; k < layout.count(); ++k) {
        if (std::abs(train.times_ps[k] - layout.positions_ps[k]) > 1e-9) {
            throw Error(ErrorCode::LayoutMismatch,
                        "pulse " + std::to_string(k) + " does not coincide with its layout bin");
        }
    }
    const auto t_idx = layout.t_indices(grid);
    const auto pump = shg_phases(train);
    const double a = 1.0 / std::sqrt(static_cast<double>(layout.count()));
    AmplitudeMap amps;
    for (std::size_t k = 0; k < layout.count(); ++k) {
        const TimeFreqMode m{t_idx[k], 0};
        amps[ModePair{m, m}] = std::polar(a, pump[k]);
    }
    return JointTwoPhotonState::from_amplitudes(grid, std::move(amps), kSignalIdlerOffsetGhz);
}

/// Reference cluster state on a four-bin layout.
inline JointTwoPhotonState cluster_state(const BinLayout &layout, const ModeGrid &grid) {
    if (layout.count() != 4) throw Error(ErrorCode::LayoutMismatch, "the cluster state needs a four-bin layout");
    return generate_pair_state(ExcitationTrain{layout.positions_ps, {0.0, 0.0, 0.0, std::numbers::pi / 2.0}}, layout,
                               grid);
}

struct ClusterCheck {
    bool is_cluster = false;
    double fidelity = 0.0;
};

/// Fidelity |⟨Ψ_C|ψ⟩|² against the ideal cluster state on the same layout.
inline ClusterCheck is_cluster_state(const JointTwoPhotonState &state, const BinLayout &layout) {
    if (layout.count() != 4) return {};
    const JointTwoPhotonState ref = cluster_state(layout, state.grid());
    const double f = std::norm(inner_product(ref, state));
    return {f > 1.0 - 1e-9, f};
}

}  // namespace tbc
