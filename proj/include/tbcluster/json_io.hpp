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
 * JSON and file helpers: state serialization with ordered keys, FNV-1a
 * hashing, fixed-precision number formatting and atomic file writes.
 */

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tbcluster/core_modes.hpp"
#include "tbcluster/error.hpp"

namespace tbc {

using ojson = nlohmann::ordered_json;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Shortest-round-trip-safe decimal form ("%.17g").
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline ojson state_to_json(const JointTwoPhotonState &state) {
    ojson j;
    j["grid"] = {{"time_quantum_ps", state.grid().time_quantum_ps},
                 {"freq_quantum_ghz", state.grid().freq_quantum_ghz},
                 {"time_origin_ps", state.grid().time_origin_ps}};
    j["signal_idler_offset_ghz"] = state.signal_idler_offset_ghz();
    j["norm"] = state.norm_tracking();
    ojson amps = ojson::array();
    for (const auto &[pair, a] : state.amplitudes()) {
        amps.push_back({{"t_s", pair.signal.t_index},
                        {"f_s", pair.signal.f_index},
                        {"t_i", pair.idler.t_index},
                        {"f_i", pair.idler.f_index},
                        {"re", a.real()},
                        {"im", a.imag()}});
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

inline JointTwoPhotonState state_from_json(const ojson &j) {
    try {
        const auto &g = j.at("grid");
        ModeGrid grid{g.at("time_quantum_ps").get<double>(), g.at("freq_quantum_ghz").get<double>(),
                      g.at("time_origin_ps").get<double>()};
        AmplitudeMap amps;
        for (const auto &a : j.at("amplitudes")) {
            const ModePair p{TimeFreqMode{a.at("t_s").get<std::int64_t>(), a.at("f_s").get<std::int64_t>()},
                             TimeFreqMode{a.at("t_i").get<std::int64_t>(), a.at("f_i").get<std::int64_t>()}};
            amps[p] = Amplitude{a.at("re").get<double>(), a.at("im").get<double>()};
        }
        return JointTwoPhotonState::from_amplitudes(grid, std::move(amps), j.at("signal_idler_offset_ghz").get<double>());
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed state JSON: ") + e.what());
    }
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorCode::InvalidArgument, "write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace tbc
