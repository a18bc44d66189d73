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
 * Multi-level time-bin encoding. Each level of a d-ary tree encodes one
 * qudit (a qubit for d = 2); a photon with N levels occupies d^N bins.
 *
 * Levels are ordered outermost first, i.e. by decreasing shift, and the
 * outermost level is the most significant digit of a bin index. Bin k sits at
 *     position(k) = Σ_level digit_level(k) · shift_level,
 * which is the unique layout in which every level bridges a constant shift.
 * For the default T = 300 ps, t = 100 ps this gives 0, 100, 300, 400 ps.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tbcluster/core_modes.hpp"
#include "tbcluster/error.hpp"

namespace tbc {

struct Level {
    std::string name;
    double shift_ps = 0.0;
    double rf_ghz = 0.0;

    bool operator==(const Level &) const = default;
};

struct LevelSpec {
    std::vector<Level> levels;  // outermost (largest shift) first
    int arity = 2;

    static LevelSpec paper_default() {
        return LevelSpec{{Level{"T", 300.0, 3.75}, Level{"t", 100.0, 1.25}}, 2};
    }

    std::size_t size() const { return levels.size(); }

    std::size_t bin_count() const {
        std::size_t n = 1;
        for (std::size_t i = 0; i < levels.size(); ++i) n *= static_cast<std::size_t>(arity);
        return n;
    }

    std::optional<std::size_t> index_of(const std::string &name) const {
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (levels[i].name == name) return i;
        }
        return std::nullopt;
    }

    const Level &level(const std::string &name) const {
        auto idx = index_of(name);
        if (!idx) throw Error(ErrorCode::UnknownLevel, "no level named '" + name + "'");
        return levels[*idx];
    }

    bool operator==(const LevelSpec &) const = default;
};

/// Bin arrival times, strictly increasing, one per leaf of the encoding tree.
struct BinLayout {
    std::vector<double> positions_ps;

    std::size_t count() const { return positions_ps.size(); }

    /// Grid index of each bin. Throws GridMismatch for off-grid positions.
    std::vector<std::int64_t> t_indices(const ModeGrid &grid) const {
        std::vector<std::int64_t> out;
        out.reserve(positions_ps.size());
        for (double p : positions_ps) {
            const double q = (p - grid.time_origin_ps) / grid.time_quantum_ps;
            const double r = std::round(q);
            if (std::abs(q - r) > 1e-9) {
                throw Error(ErrorCode::GridMismatch, "bin position " + std::to_string(p) + " ps is off the time grid");
            }
            out.push_back(static_cast<std::int64_t>(r));
        }
        return out;
    }

    double smallest_spacing_ps() const {
        double best = INFINITY;
        for (std::size_t i = 1; i < positions_ps.size(); ++i) best = std::min(best, positions_ps[i] - positions_ps[i - 1]);
        return best;
    }

    bool operator==(const BinLayout &) const = default;
};

using Bits = std::vector<int>;

namespace detail {

inline std::size_t int_pow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

inline std::size_t levels_for_count(std::size_t count, int arity) {
    std::size_t n = 0;
    std::size_t c = 1;
    while (c < count) {
        c *= static_cast<std::size_t>(arity);
        ++n;
    }
    if (c != count) throw Error(ErrorCode::LayoutMismatch, "bin count is not a power of the arity");
    return n;
}

}  // namespace detail

/// Digits of a bin index, outermost level first.
inline Bits bin_to_bits(const BinLayout &layout, std::size_t bin_index, int arity = 2) {
    if (bin_index >= layout.count()) {
        throw Error(ErrorCode::OutOfRange, "bin index " + std::to_string(bin_index) + " outside layout of " +
                                               std::to_string(layout.count()) + " bins");
    }
    const std::size_t n = detail::levels_for_count(layout.count(), arity);
    Bits bits(n, 0);
    std::size_t v = bin_index;
    for (std::size_t k = n; k-- > 0;) {
        bits[k] = static_cast<int>(v % static_cast<std::size_t>(arity));
        v /= static_cast<std::size_t>(arity);
    }
    return bits;
}

inline std::size_t bits_to_bin(const BinLayout &layout, const Bits &bits, int arity = 2) {
    const std::size_t n = detail::levels_for_count(layout.count(), arity);
    if (bits.size() != n) {
        throw Error(ErrorCode::LengthMismatch,
                    "expected " + std::to_string(n) + " digits, got " + std::to_string(bits.size()));
    }
    std::size_t v = 0;
    for (int b : bits) {
        if (b < 0 || b >= arity) throw Error(ErrorCode::OutOfRange, "digit outside [0, arity)");
        v = v * static_cast<std::size_t>(arity) + static_cast<std::size_t>(b);
    }
    return v;
}

/// Layout generated from the level shifts. Throws IncompatibleShift when
/// positions collide or fail to increase with the bin index.
inline BinLayout default_layout(const LevelSpec &spec) {
    const std::size_t count = spec.bin_count();
    BinLayout layout;
    layout.positions_ps.resize(count, 0.0);
    for (std::size_t b = 0; b < count; ++b) {
        std::size_t v = b;
        double pos = 0.0;
        for (std::size_t k = spec.size(); k-- > 0;) {
            pos += static_cast<double>(v % static_cast<std::size_t>(spec.arity)) * spec.levels[k].shift_ps;
            v /= static_cast<std::size_t>(spec.arity);
        }
        layout.positions_ps[b] = pos;
    }
    for (std::size_t b = 1; b < count; ++b) {
        if (!(layout.positions_ps[b] > layout.positions_ps[b - 1])) {
            throw Error(ErrorCode::IncompatibleShift,
                        "level shifts do not produce distinct, increasing bin positions");
        }
    }
    return layout;
}

/// Checks the uniform-shift property: flipping the digit of any level moves the
/// arrival time by that level's shift, independent of the other digits.
inline bool has_uniform_shifts(const BinLayout &layout, const LevelSpec &spec, double tol_ps = 1e-9) {
    if (layout.count() != spec.bin_count()) return false;
    for (std::size_t b = 0; b < layout.count(); ++b) {
        const Bits bits = bin_to_bits(layout, b, spec.arity);
        for (std::size_t k = 0; k < spec.size(); ++k) {
            if (bits[k] + 1 >= spec.arity) continue;
            Bits up = bits;
            ++up[k];
            const double d = layout.positions_ps[bits_to_bin(layout, up, spec.arity)] - layout.positions_ps[b];
            if (std::abs(d - spec.levels[k].shift_ps) > tol_ps) return false;
        }
    }
    return true;
}

/// Pairs of bins (digit 0, digit 1) bridged by the beam splitter of one level.
inline std::vector<std::pair<std::size_t, std::size_t>> level_pairs(const LevelSpec &spec, std::size_t level_index) {
    if (spec.arity != 2) throw Error(ErrorCode::UnsupportedLevels, "level pairs are defined for binary trees only");
    if (level_index >= spec.size()) throw Error(ErrorCode::UnknownLevel, "level index out of range");
    BinLayout probe;
    probe.positions_ps.resize(spec.bin_count());
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t b = 0; b < spec.bin_count(); ++b) {
        Bits bits = bin_to_bits(probe, b);
        if (bits[level_index] != 0) continue;
        bits[level_index] = 1;
        out.emplace_back(b, bits_to_bin(probe, bits));
    }
    return out;
}

/**
 * Adds a level and re-sorts by shift. The new shift must be a whole number of
 * grid time quanta and the generated layout must keep distinct, increasing
 * positions, otherwise IncompatibleShift.
 */
inline LevelSpec extend_levels(const LevelSpec &spec, const Level &new_level, const ModeGrid &grid) {
    grid.validate();
    const double q = new_level.shift_ps / grid.time_quantum_ps;
    if (!(new_level.shift_ps > 0.0) || std::abs(q - std::round(q)) > 1e-9) {
        throw Error(ErrorCode::IncompatibleShift,
                    "shift " + std::to_string(new_level.shift_ps) + " ps is not a multiple of the grid quantum");
    }
    if (spec.index_of(new_level.name)) {
        throw Error(ErrorCode::IncompatibleShift, "level '" + new_level.name + "' already exists");
    }
    LevelSpec out = spec;
    out.levels.push_back(new_level);
    std::stable_sort(out.levels.begin(), out.levels.end(),
                     [](const Level &a, const Level &b) { return a.shift_ps > b.shift_ps; });
    (void)default_layout(out);
    return out;
}

struct QubitAddress {
    Photon photon = Photon::Signal;
    std::string level;
};

}  // namespace tbc
