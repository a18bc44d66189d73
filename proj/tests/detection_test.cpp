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

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tbcluster/detection.hpp"
#include "tbcluster/source.hpp"

namespace {

const tbc::LevelSpec kLevels = tbc::LevelSpec::paper_default();
const tbc::ModeGrid kGrid{};

tbc::JointTwoPhotonState cluster() { return tbc::cluster_state(tbc::default_layout(kLevels), kGrid); }

std::vector<tbc::JointTemporalIntensity> exact_run(const tbc::MeasurementModel &model,
                                                   const tbc::DetectorModel &det = tbc::DetectorModel::ideal()) {
    tbc::SamplingOptions so;
    so.exact = true;
    return tbc::sample_coincidences(cluster(), tbc::build_default_schedule(kLevels), det, model, so, 1);
}

TEST(Schedule, DefaultLayout) {
    const auto s = tbc::build_default_schedule(kLevels);
    EXPECT_EQ(s.segments(), 18u);
    EXPECT_EQ(s.entries.size(), 18u);
    ASSERT_EQ(s.pairing.size(), 9u);
    std::set<std::size_t> used;
    for (const auto &e : s.entries) used.insert(e.segment);
    EXPECT_EQ(used.size(), 18u);
    const std::size_t expected[9][2] = {{0, 5}, {2, 7}, {4, 9}, {6, 11}, {8, 13}, {10, 15}, {12, 17}, {14, 1}, {16, 3}};
    for (std::size_t k = 0; k < 9; ++k) {
        EXPECT_EQ(s.pairing[k].signal_segment, expected[k][0]);
        EXPECT_EQ(s.pairing[k].idler_segment, expected[k][1]);
        EXPECT_EQ(s.pairing[k].idler_segment, (s.pairing[k].signal_segment + 5) % 18);
    }
    std::map<std::string, int> sig;
    std::map<std::string, int> idl;
    for (const auto &e : s.entries) (e.photon == tbc::Photon::Signal ? sig : idl)[e.setting.label()]++;
    for (const char *l : {"Z", "X_t", "X_T"}) {
        EXPECT_EQ(sig[l], 3);
        EXPECT_EQ(idl[l], 3);
    }
    std::set<std::string> keys;
    for (const auto &j : s.joint_settings()) keys.insert(tbc::basis_key(j, kLevels));
    EXPECT_EQ(keys.size(), 9u);
    for (const char *k : tbc::kWitnessBases) EXPECT_TRUE(keys.count(k)) << k;
}

TEST(Schedule, NeedsTwoLevels) {
    tbc::LevelSpec one{{tbc::Level{"t", 100.0, 1.25}}, 2};
    EXPECT_THROW(tbc::build_default_schedule(one), tbc::Error);
    const auto three = tbc::extend_levels(kLevels, tbc::Level{"L", 900.0, 11.25}, kGrid);
    try {
        tbc::build_default_schedule(three);
        FAIL();
    } catch (const tbc::Error &e) {
        EXPECT_EQ(e.code(), tbc::ErrorCode::UnsupportedLevels);
    }
}

TEST(Detection, ZZOnClusterIsDiagonal) {
    const auto h = exact_run({});
    const auto &zz = h[0];
    const auto bins = zz.orthogonal_cells;
    for (auto s : bins)
        for (auto i : bins) EXPECT_NEAR(zz.at(s, i) / 1e6, s == i ? 0.25 : 0.0, 1e-14);
    EXPECT_NEAR(zz.ancillary(), 0.0, 1e-9);
}

// Every basis against the density-matrix oracle for several noise levels.
TEST(Detection, ProjectionsMatchDensityOracle) {
    for (double p : {0.0, 0.1, 1.0 / 3.0, 0.5, 1.0}) {
        tbc::MeasurementModel m;
        m.white_noise = p;
        const auto set = tbc::extract_projections(exact_run(m), kLevels, kGrid);
        EXPECT_EQ(set.bases.size(), 9u);
        const auto rho = oracle::white_noise_mix(oracle::pure_density(oracle::cluster_qubits()), p);
        for (const auto &b : set.bases) {
            const auto ref = oracle::basis_probabilities(rho, b.key.c_str());
            double sum = 0.0;
            for (std::size_t k = 0; k < 16; ++k) {
                EXPECT_NEAR(b.normalized[k], ref[k], 1e-12) << b.key << " p=" << p << " k=" << k;
                sum += b.normalized[k];
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(Detection, IdealXXBasisPattern) {
    const auto set = tbc::extract_projections(exact_run({}), kLevels, kGrid);
    const auto *b = set.find("XXZZ");
    ASSERT_NE(b, nullptr);
    int nonzero = 0;
    for (double v : b->normalized) {
        if (v > 1e-12) {
            ++nonzero;
            EXPECT_NEAR(v, 0.25, 1e-12);
        }
    }
    EXPECT_EQ(nonzero, 4);
    const auto *m = set.find("XZZX");
    ASSERT_NE(m, nullptr);
    for (double v : m->normalized) EXPECT_NEAR(v, 1.0 / 16.0, 1e-12);
}

TEST(Detection, RetainedFractionFollowsEfficiency) {
    const auto h = exact_run({});
    const double eta = tbc::efficiency(tbc::solve_balanced_depth());
    // settings a (Z,Z), e (X_t,X_t), b (Z,X_t)
    auto orth = [](const tbc::JointTemporalIntensity &j) { return j.counts.total() - j.ancillary(); };
    EXPECT_NEAR(orth(h[0]) / 1e6, 1.0, 1e-12);
    EXPECT_NEAR(orth(h[1]) / 1e6, eta, 1e-12);
    EXPECT_NEAR(orth(h[4]) / 1e6, eta * eta, 1e-12);
}

TEST(Detection, GramPenaltyScalesParityPerPhoton) {
    tbc::MeasurementModel m;
    m.visibility_penalty = {{"t", 0.9}, {"T", 0.8}};
    const auto set = tbc::extract_projections(exact_run(m), kLevels, kGrid);
    const auto *zzxx = set.find("ZZXX");
    const auto *xxzz = set.find("XXZZ");
    // two-photon X parity scales with the product of the per-photon overlaps
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        const int tp = ((k >> 1) & 1) ^ (k & 1);
        const int Tp = ((k >> 3) & 1) ^ ((k >> 2) & 1);
        e1 += (tp ? -1.0 : 1.0) * ((k >> 2) & 1 ? -1.0 : 1.0) * zzxx->normalized[k];
        e2 += (Tp ? -1.0 : 1.0) * ((k & 1) ? -1.0 : 1.0) * xxzz->normalized[k];
    }
    EXPECT_NEAR(e1, 0.81, 1e-12);
    EXPECT_NEAR(e2, 0.64, 1e-12);
}

TEST(Detection, JitterKernelMatchesGaussianTails) {
    const tbc::DetectorModel det;
    const double sigma = std::hypot(17.0, 18.0);
    EXPECT_NEAR(det.sigma_ps(tbc::Photon::Signal), 24.76, 0.01);
    const auto h = exact_run({}, det);
    const auto &zz = h[0];
    auto w = [&](std::int64_t d) {
        const double c = static_cast<double>(d) * 100.0;
        return oracle::phi((c + 50.0) / sigma) - oracle::phi((c - 50.0) / sigma);
    };
    for (std::int64_t s = -2; s <= 6; ++s) {
        for (std::int64_t i = -2; i <= 6; ++i) {
            double ref = 0.0;
            for (std::int64_t b : {0, 1, 3, 4}) ref += 0.25 * w(s - b) * w(i - b);
            EXPECT_NEAR(zz.at(s, i) / 1e6, ref, 1e-12);
        }
    }
    // one-sided tail beyond half a bin
    EXPECT_NEAR(1.0 - w(0), 2.0 * oracle::phi(-50.0 / sigma), 1e-12);
    EXPECT_LT(w(1), 0.022);
}

TEST(Detection, CrosstalkGrowsWithJitter) {
    double last = -1.0;
    for (double j : {0.0, 10.0, 20.0, 30.0, 40.0}) {
        tbc::DetectorModel det{j, j, 0.0, 50.0, 0.0, 1.0};
        const auto set = tbc::extract_projections(exact_run({}, det), kLevels, kGrid);
        const auto &p = set.find("ZZZZ")->normalized;
        const double off = 1.0 - (p[0] + p[3] + p[12] + p[15]);
        EXPECT_GT(off, last) << j;
        last = off;
    }
}

TEST(Detection, ArrivalOffsetShiftsCells) {
    tbc::SamplingOptions so;
    so.exact = true;
    so.signal_offset_ps = 100.0;
    const auto h = tbc::sample_coincidences(cluster(), tbc::build_default_schedule(kLevels),
                                            tbc::DetectorModel::ideal(), {}, so, 1);
    EXPECT_NEAR(h[0].at(1, 0) / 1e6, 0.25, 1e-14);
    EXPECT_NEAR(h[0].at(5, 4) / 1e6, 0.25, 1e-14);
    EXPECT_NEAR(h[0].at(0, 0), 0.0, 1e-14);
}

TEST(Detection, DarkCoincidencesAreUniform) {
    tbc::DetectorModel det = tbc::DetectorModel::ideal();
    det.dark_fraction = 0.1;
    const auto h = exact_run({}, det);
    const auto &g = h[0].counts;
    const double add = 0.1 * 1e6 / static_cast<double>(g.values.size());
    EXPECT_NEAR(g.at(0, 1), add, 1e-9);
    EXPECT_NEAR(g.at(0, 0), 0.25e6 + add, 1e-6);
    EXPECT_NEAR(g.total(), 1.1e6, 1e-6);
}

TEST(Detection, UniformLossLeavesProjectionsUnchanged) {
    tbc::DetectorModel det = tbc::DetectorModel::ideal();
    det.efficiency = 0.3;
    tbc::MeasurementModel m;
    m.white_noise = 0.2;
    const auto a = tbc::extract_projections(exact_run(m), kLevels, kGrid);
    const auto b = tbc::extract_projections(exact_run(m, det), kLevels, kGrid);
    for (std::size_t k = 0; k < a.bases.size(); ++k)
        for (std::size_t o = 0; o < 16; ++o) EXPECT_NEAR(a.bases[k].normalized[o], b.bases[k].normalized[o], 1e-12);
}

TEST(Detection, SamplingIsFaithfulAndSeeded) {
    tbc::MeasurementModel m;
    m.white_noise = 0.1;
    const tbc::DetectorModel det;
    const auto sched = tbc::build_default_schedule(kLevels);
    tbc::SamplingOptions so;
    so.pairs_per_setting = 1000000;
    const auto a = tbc::sample_coincidences(cluster(), sched, det, m, so, 7);
    const auto b = tbc::sample_coincidences(cluster(), sched, det, m, so, 7);
    const auto c = tbc::sample_coincidences(cluster(), sched, det, m, so, 8);
    so.exact = true;
    const auto e = tbc::sample_coincidences(cluster(), sched, det, m, so, 7);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].counts.values, b[k].counts.values);
        differs = differs || a[k].counts.values != c[k].counts.values;
        for (std::size_t i = 0; i < a[k].counts.values.size(); ++i) {
            const double mean = e[k].counts.values[i];
            const double x = a[k].counts.values[i];
            EXPECT_EQ(x, std::round(x));
            EXPECT_LE(std::abs(x - mean), 5.0 * std::sqrt(mean) + 1.0);
        }
    }
    EXPECT_TRUE(differs);
}

TEST(Detection, MissingBasisIsReported) {
    auto h = exact_run({});
    h.erase(h.begin() + 4);  // (X_t, X_t)
    try {
        tbc::extract_projections(h, kLevels, kGrid);
        FAIL();
    } catch (const tbc::Error &e) {
        EXPECT_EQ(e.code(), tbc::ErrorCode::MissingBasis);
    }
}

TEST(Detection, CrossPairScatteringIsOptIn) {
    tbc::MeasurementModel m;
    m.cross_pair_scattering = true;
    const auto iso = exact_run({});
    const auto full = exact_run(m);
    EXPECT_GT(full[4].ancillary(), iso[4].ancillary());
    const auto a = tbc::extract_projections(iso, kLevels, kGrid);
    const auto b = tbc::extract_projections(full, kLevels, kGrid);
    // ZZ basis is untouched, X bases pick up light from neighbouring pairs
    EXPECT_EQ(a.find("ZZZZ")->normalized, b.find("ZZZZ")->normalized);
    double diff = 0.0;
    for (std::size_t k = 0; k < 16; ++k)
        diff = std::max(diff, std::abs(a.find("ZZXX")->normalized[k] - b.find("ZZXX")->normalized[k]));
    EXPECT_GT(diff, 1e-2);
}

TEST(Detection, OutcomeTable) {
    const auto t = tbc::outcome_table(tbc::build_default_schedule(kLevels), kLevels, kGrid);
    EXPECT_EQ(t.size(), 72u);
    // X_t on bin 1 (t digit 1) is the + outcome
    const auto b = tbc::photon_outcome(tbc::BeamSplitterSetting::x("t"), kLevels, kGrid, 1);
    ASSERT_TRUE(b.has_value());
    EXPECT_EQ(*b, (tbc::Bits{0, 0}));
    EXPECT_FALSE(tbc::photon_outcome(tbc::BeamSplitterSetting::z(), kLevels, kGrid, 2).has_value());
}

}  // namespace
