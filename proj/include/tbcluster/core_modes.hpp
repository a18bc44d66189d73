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
 * Time-frequency mode labels and the sparse two-photon amplitude state that
 * every other module operates on.
 *
 * A mode is a point on an integer lattice: t_index counts time quanta and
 * f_index counts frequency quanta of a ModeGrid. Coordinates are signed and
 * unbounded because chirped-pulse modulation scatters photons into ancillary
 * bins on both sides of the input.
 */

#pragma once

#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tbcluster/error.hpp"

namespace tbc {

using Amplitude = std::complex<double>;

/// Amplitudes below this magnitude are dropped after every operation.
inline constexpr double kSparsityThreshold = 1e-12;

/// Tolerance on the Σ|w|² ≤ 1 contractivity check of a mode map.
inline constexpr double kContractivityTolerance = 1e-9;

struct ModeGrid {
    double time_quantum_ps = 100.0;
    double freq_quantum_ghz = 1.25;
    double time_origin_ps = 0.0;

    void validate() const {
        if (!(time_quantum_ps > 0.0) || !(freq_quantum_ghz > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "ModeGrid quanta must be positive");
        }
    }

    double time_of(std::int64_t t_index) const {
        return time_origin_ps + static_cast<double>(t_index) * time_quantum_ps;
    }

    double frequency_of(std::int64_t f_index) const {
        return static_cast<double>(f_index) * freq_quantum_ghz;
    }

    bool operator==(const ModeGrid &) const = default;
};

struct TimeFreqMode {
    std::int64_t t_index = 0;
    std::int64_t f_index = 0;

    auto operator<=>(const TimeFreqMode &) const = default;
};

enum class Photon { Signal, Idler };

inline const char *photon_name(Photon p) { return p == Photon::Signal ? "signal" : "idler"; }

struct ModePair {
    TimeFreqMode signal;
    TimeFreqMode idler;

    auto operator<=>(const ModePair &) const = default;
};

using AmplitudeMap = std::map<ModePair, Amplitude>;

/// Weighted image of one input mode under a linear single-photon operation.
using WeightedModes = std::vector<std::pair<TimeFreqMode, Amplitude>>;

/// A linear single-photon operation given by its action on basis modes.
using ModeMap = std::function<WeightedModes(const TimeFreqMode &)>;

/**
 * Sparse pure two-photon state. Values are immutable once built; every
 * operation returns a new state.
 *
 * norm_tracking is the probability retained so far relative to a normalized
 * source state. It always equals the stored Σ|a|², so losses remain visible
 * instead of being silently renormalized away.
 */
class JointTwoPhotonState {
   public:
    JointTwoPhotonState() = default;

    /// Builds a state from raw amplitudes, dropping entries below the
    /// sparsity threshold. norm_tracking is set to the resulting Σ|a|².
    static JointTwoPhotonState from_amplitudes(const ModeGrid &grid, AmplitudeMap amplitudes,
                                               double signal_idler_offset_ghz = 0.0) {
        grid.validate();
        JointTwoPhotonState s;
        s.grid_ = grid;
        s.signal_idler_offset_ghz_ = signal_idler_offset_ghz;
        std::erase_if(amplitudes, [](const auto &kv) { return std::abs(kv.second) < kSparsityThreshold; });
        s.amplitudes_ = std::move(amplitudes);
        s.norm_tracking_ = s.sum_probability();
        return s;
    }

    const ModeGrid &grid() const { return grid_; }
    const AmplitudeMap &amplitudes() const { return amplitudes_; }
    double norm_tracking() const { return norm_tracking_; }
    double signal_idler_offset_ghz() const { return signal_idler_offset_ghz_; }
    std::size_t size() const { return amplitudes_.size(); }
    bool empty() const { return amplitudes_.empty(); }

    Amplitude amplitude(const TimeFreqMode &signal, const TimeFreqMode &idler) const {
        auto it = amplitudes_.find(ModePair{signal, idler});
        return it == amplitudes_.end() ? Amplitude{} : it->second;
    }

    double sum_probability() const {
        double total = 0.0;
        for (const auto &[pair, a] : amplitudes_) total += std::norm(a);
        return total;
    }

   private:
    ModeGrid grid_{};
    AmplitudeMap amplitudes_;
    double norm_tracking_ = 0.0;
    double signal_idler_offset_ghz_ = 0.0;
};

inline JointTwoPhotonState normalize(const JointTwoPhotonState &state) {
    const double total = state.sum_probability();
    if (state.empty() || total <= 0.0) {
        throw Error(ErrorCode::ZeroState, "cannot normalize a state with no amplitude above threshold");
    }
    const double scale = 1.0 / std::sqrt(total);
    AmplitudeMap out;
    for (const auto &[pair, a] : state.amplitudes()) out.emplace(pair, a * scale);
    return JointTwoPhotonState::from_amplitudes(state.grid(), std::move(out), state.signal_idler_offset_ghz());
}

/// Multiplies every amplitude by a common factor (used for uniform loss).
inline JointTwoPhotonState scale_amplitudes(const JointTwoPhotonState &state, Amplitude factor) {
    AmplitudeMap out;
    for (const auto &[pair, a] : state.amplitudes()) out.emplace(pair, a * factor);
    return JointTwoPhotonState::from_amplitudes(state.grid(), std::move(out), state.signal_idler_offset_ghz());
}

/**
 * Applies a linear map to one photon of the pair. Images of each distinct
 * input mode are computed once. Throws NonContractive when an input mode's
 * weights carry more than unit probability.
 */
inline JointTwoPhotonState apply_single_photon_map(const JointTwoPhotonState &state, Photon photon,
                                                   const ModeMap &mode_map) {
    std::map<TimeFreqMode, WeightedModes> images;
    auto image_of = [&](const TimeFreqMode &m) -> const WeightedModes & {
        auto it = images.find(m);
        if (it != images.end()) return it->second;
        WeightedModes img = mode_map(m);
        double weight = 0.0;
        for (const auto &[out, w] : img) weight += std::norm(w);
        if (weight > 1.0 + kContractivityTolerance) {
            throw Error(ErrorCode::NonContractive,
                        "mode map image carries probability " + std::to_string(weight) + " > 1");
        }
        return images.emplace(m, std::move(img)).first->second;
    };

    AmplitudeMap out;
    for (const auto &[pair, a] : state.amplitudes()) {
        const TimeFreqMode &src = photon == Photon::Signal ? pair.signal : pair.idler;
        for (const auto &[dst, w] : image_of(src)) {
            ModePair key = pair;
            (photon == Photon::Signal ? key.signal : key.idler) = dst;
            out[key] += a * w;
        }
    }
    return JointTwoPhotonState::from_amplitudes(state.grid(), std::move(out), state.signal_idler_offset_ghz());
}

inline double projection_probability(const JointTwoPhotonState &state, const TimeFreqMode &signal_mode,
                                     const TimeFreqMode &idler_mode) {
    return std::norm(state.amplitude(signal_mode, idler_mode));
}

inline ModeMap identity_map() {
    return [](const TimeFreqMode &m) { return WeightedModes{{m, Amplitude{1.0, 0.0}}}; };
}

/// ⟨a|b⟩ summed over the entries both states store.
inline Amplitude inner_product(const JointTwoPhotonState &a, const JointTwoPhotonState &b) {
    Amplitude acc{};
    const auto &small = a.size() <= b.size() ? a.amplitudes() : b.amplitudes();
    const bool a_is_small = a.size() <= b.size();
    for (const auto &[pair, amp] : small) {
        const Amplitude other = a_is_small ? b.amplitude(pair.signal, pair.idler) : a.amplitude(pair.signal, pair.idler);
        acc += a_is_small ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return acc;
}

}  // namespace tbc
