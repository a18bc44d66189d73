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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tbcluster/source.hpp"

namespace {

constexpr double kPi = std::numbers::pi;
const tbc::BinLayout kLayout = tbc::default_layout(tbc::LevelSpec::paper_default());
const tbc::ModeGrid kGrid{};

std::vector<double> phases_of(const tbc::ExcitationTrain &t) { return tbc::shg_phases(t); }

TEST(ShgPhases, Doubling) {
    tbc::ExcitationTrain t;
    auto p = phases_of(t);
    EXPECT_NEAR(p[0], 0.0, 1e-15);
    EXPECT_NEAR(p[3], kPi, 1e-15);
    t.phases_rad = {0, 0, 0, 0};
    for (double v : phases_of(t)) EXPECT_EQ(v, 0.0);
    t.phases_rad = {kPi / 4, kPi / 2, 3 * kPi / 4, kPi};
    p = phases_of(t);
    EXPECT_NEAR(p[0], kPi / 2, 1e-12);
    EXPECT_NEAR(p[1], kPi, 1e-12);
    EXPECT_NEAR(p[2], 3 * kPi / 2, 1e-12);
    EXPECT_NEAR(p[3], 0.0, 1e-12);
}

TEST(GeneratePairState, DefaultIsCluster) {
    const auto s = tbc::generate_pair_state(tbc::ExcitationTrain{}, kLayout, kGrid);
    const double expect[4] = {0.5, 0.5, 0.5, -0.5};
    const std::int64_t t[4] = {0, 1, 3, 4};
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(std::abs(s.amplitude({t[k], 0}, {t[k], 0}) - tbc::Amplitude{expect[k]}), 0.0, 1e-15);
    }
    EXPECT_EQ(s.size(), 4u);
    EXPECT_DOUBLE_EQ(s.signal_idler_offset_ghz(), 600.0);
    const auto chk = tbc::is_cluster_state(s, kLayout);
    EXPECT_TRUE(chk.is_cluster);
    EXPECT_NEAR(chk.fidelity, 1.0, 1e-12);
}

TEST(GeneratePairState, ZeroPhases) {
    tbc::ExcitationTrain t;
    t.phases_rad = {0, 0, 0, 0};
    const auto s = tbc::generate_pair_state(t, kLayout, kGrid);
    for (const auto &[p, a] : s.amplitudes()) EXPECT_NEAR(std::abs(a - tbc::Amplitude{0.5}), 0.0, 1e-15);
    const auto chk = tbc::is_cluster_state(s, kLayout);
    EXPECT_FALSE(chk.is_cluster);
    // oracle: |Σ_k conj(c_k) c'_k|² with c = ½(1,1,1,-1), c' = ½(1,1,1,1)
    const auto c = oracle::cluster_qubits();
    const oracle::cd ov = std::conj(c[0]) * 0.5 + std::conj(c[3]) * 0.5 + std::conj(c[12]) * 0.5 + std::conj(c[15]) * 0.5;
    EXPECT_NEAR(chk.fidelity, std::norm(ov), 1e-12);
    EXPECT_NEAR(chk.fidelity, 0.25, 1e-12);
}

TEST(GeneratePairState, OrthogonalPattern) {
    tbc::ExcitationTrain t;
    t.phases_rad = {0, kPi / 2, 0, 0};  // pump terms (1, -1, 1, 1)
    const auto chk = tbc::is_cluster_state(tbc::generate_pair_state(t, kLayout, kGrid), kLayout);
    EXPECT_NEAR(chk.fidelity, 0.0, 1e-12);
}

TEST(GeneratePairState, SinglePulse) {
    tbc::ExcitationTrain t;
    t.times_ps = {0};
    t.phases_rad = {0};
    const auto s = tbc::generate_pair_state(t, tbc::BinLayout{{0.0}}, kGrid);
    EXPECT_EQ(s.size(), 1u);
    EXPECT_NEAR(std::abs(s.amplitude({0, 0}, {0, 0}) - tbc::Amplitude{1.0}), 0.0, 1e-15);
}

TEST(GeneratePairState, LayoutMismatch) {
    tbc::ExcitationTrain t;
    t.times_ps = {0, 100, 200, 400};
    try {
        tbc::generate_pair_state(t, kLayout, kGrid);
        FAIL();
    } catch (const tbc::Error &e) {
        EXPECT_EQ(e.code(), tbc::ErrorCode::LayoutMismatch);
    }
    t.times_ps = {0, 100, 300};
    t.phases_rad = {0, 0, 0};
    EXPECT_THROW(tbc::generate_pair_state(t, kLayout, kGrid), tbc::Error);
}

TEST(GeneratePairState, RandomPhasesAgainstOracle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    const std::int64_t t_idx[4] = {0, 1, 3, 4};
    for (int trial = 0; trial < 50; ++trial) {
        tbc::ExcitationTrain tr;
        for (double &p : tr.phases_rad) p = u(rng);
        const auto s = tbc::generate_pair_state(tr, kLayout, kGrid);
        auto shifted = tr;
        for (double &p : shifted.phases_rad) p += kPi;
        const auto s2 = tbc::generate_pair_state(shifted, kLayout, kGrid);
        for (int k = 0; k < 4; ++k) {
            const auto expect = 0.5 * std::exp(oracle::cd{0.0, 2.0 * tr.phases_rad[static_cast<std::size_t>(k)]});
            const tbc::TimeFreqMode m{t_idx[k], 0};
            EXPECT_NEAR(std::abs(s.amplitude(m, m) - expect), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(s2.amplitude(m, m) - expect), 0.0, 1e-12);
            for (int j = 0; j < 4; ++j) {
                if (j != k) {
                    EXPECT_EQ(tbc::projection_probability(s, m, {t_idx[j], 0}), 0.0);
                }
            }
        }
    }
}

}  // namespace
