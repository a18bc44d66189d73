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
 * Cluster-state witness W = 2 − ½ Σ S over the six stabilizers
 * 11ZZ, ZZ11, 1ZXX, Z1XX, XX1Z, XXZ1 (qubit order T_s, T_i, t_s, t_i), its
 * Poisson Monte-Carlo error, the fidelity bound F ≥ (1 − W)/2, XY-plane
 * fringe fits and the frequency-multiplexing capacity.
 *
 * Outcome bit 0 is eigenvalue +1 and bit 1 is −1 for both Z and X.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tbcluster/detection.hpp"
#include "tbcluster/error.hpp"
#include "tbcluster/harmonic_fit.hpp"

namespace tbc {

struct StabilizerTerm {
    std::string ops;  // four letters from {1, Z, X}

    void validate() const {
        if (ops.size() != 4) throw Error(ErrorCode::InvalidArgument, "stabilizer strings have four letters");
        for (char c : ops) {
            if (c != '1' && c != 'Z' && c != 'X') {
                throw Error(ErrorCode::InvalidArgument, "stabilizer letters must be 1, Z or X");
            }
        }
    }
};

inline const std::array<StabilizerTerm, 6> &cluster_stabilizers() {
    static const std::array<StabilizerTerm, 6> terms{StabilizerTerm{"11ZZ"}, StabilizerTerm{"ZZ11"},
                                                     StabilizerTerm{"1ZXX"}, StabilizerTerm{"Z1XX"},
                                                     StabilizerTerm{"XX1Z"}, StabilizerTerm{"XXZ1"}};
    return terms;
}

/// Σ_k p_k Π_{non-identity q} (−1)^{bit_q(k)}; qubit 0 is the most significant bit.
inline double parity_expectation(const std::string &ops, const std::array<double, 16> &p) {
    double e = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        int sign = 1;
        for (std::size_t q = 0; q < 4; ++q) {
            if (ops[q] != '1' && ((k >> (3 - q)) & 1U)) sign = -sign;
        }
        e += sign * p[k];
    }
    return e;
}

inline bool basis_covers(const std::string &basis, const std::string &ops) {
    for (std::size_t q = 0; q < 4; ++q) {
        if (ops[q] != '1' && ops[q] != basis[q]) return false;
    }
    return true;
}

/// Basis used for a term: the first covering witness basis, else any covering basis.
inline const BasisProjections &basis_for(const StabilizerTerm &term, const ProjectionSet &set) {
    term.validate();
    for (const char *key : kWitnessBases) {
        const auto *b = set.find(key);
        if (b && basis_covers(b->key, term.ops)) return *b;
    }
    for (const auto &b : set.bases) {
        if (basis_covers(b.key, term.ops)) return b;
    }
    throw Error(ErrorCode::MissingBasis, "no measured basis covers " + term.ops);
}

inline double stabilizer_expectation(const StabilizerTerm &term, const ProjectionSet &set) {
    return parity_expectation(term.ops, basis_for(term, set).normalized);
}

inline constexpr double kStabilizerThreshold = 2.0 / 3.0;

struct WitnessReport {
    std::array<double, 6> expectations{};
    double witness = 0.0;
    double stderr_ = 0.0;  // filled by the Monte-Carlo estimate
    double fidelity_bound = 0.0;
    std::array<bool, 6> threshold_pass{};
    bool all_pass = false;
    bool mean_pass = false;
};

inline WitnessReport witness_from_expectations(const std::array<double, 6> &s) {
    WitnessReport r;
    r.expectations = s;
    double sum = 0.0;
    double mean = 0.0;
    r.all_pass = true;
    for (std::size_t k = 0; k < 6; ++k) {
        sum += s[k];
        r.threshold_pass[k] = s[k] > kStabilizerThreshold;
        r.all_pass = r.all_pass && r.threshold_pass[k];
    }
    mean = sum / 6.0;
    r.mean_pass = mean > kStabilizerThreshold;
    r.witness = 2.0 - 0.5 * sum;
    r.fidelity_bound = (1.0 - r.witness) / 2.0;
    return r;
}

inline WitnessReport witness(const ProjectionSet &set) {
    std::array<double, 6> s{};
    for (std::size_t k = 0; k < 6; ++k) s[k] = stabilizer_expectation(cluster_stabilizers()[k], set);
    return witness_from_expectations(s);
}

/// White-noise fraction giving a target witness on the ideal cluster state.
inline double noise_for_witness(double w) { return (w + 1.0) / 3.0; }

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;

    double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size()); }
};

struct MonteCarloResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
    Histogram histogram;
};

struct MonteCarloOptions {
    std::uint64_t samples = 1000000;
    std::size_t bins = 60;
    std::uint64_t chunk = 1U << 14;
    unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

/// Poisson draws; means up to 1000 use a tabulated pmf truncated at
/// λ + 12√λ + 30 (tail below 1e-20), larger means the standard sampler.
class PoissonSampler {
  public:
    explicit PoissonSampler(double mean) {
        if (!(mean > 0.0)) return;
        if (mean > 1000.0) {
            large_.emplace(mean);
            return;
        }
        const auto kmax = static_cast<std::size_t>(mean + 12.0 * std::sqrt(mean) + 30.0);
        std::vector<double> pmf(kmax + 1);
        double log_p = -mean;
        for (std::size_t k = 0; k <= kmax; ++k) {
            if (k > 0) log_p += std::log(mean / static_cast<double>(k));
            pmf[k] = std::exp(log_p);
        }
        table_.emplace(pmf.begin(), pmf.end());
    }

    double operator()(std::mt19937_64 &rng) {
        if (table_) return static_cast<double>((*table_)(rng));
        if (large_) return static_cast<double>((*large_)(rng));
        return 0.0;
    }

  private:
    std::optional<std::discrete_distribution<std::size_t>> table_;
    std::optional<std::poisson_distribution<std::int64_t>> large_;
};

}  // namespace detail

/**
 * Resamples every raw count of the bases used by the six stabilizers as
 * Poisson(count) and recomputes the witness. Chunk c draws from
 * splitmix64(seed ^ splitmix64(c)), so results do not depend on threading.
 * Samples in which a basis receives no counts are skipped.
 */
inline MonteCarloResult monte_carlo_error(const ProjectionSet &set, std::uint64_t seed,
                                          const MonteCarloOptions &opt = {}) {
    if (opt.samples == 0 || opt.chunk == 0 || opt.bins == 0) {
        throw Error(ErrorCode::InvalidArgument, "Monte-Carlo sample, chunk and bin counts must be positive");
    }
    std::vector<const BasisProjections *> used;
    std::array<std::size_t, 6> which{};
    for (std::size_t k = 0; k < 6; ++k) {
        const BasisProjections *b = &basis_for(cluster_stabilizers()[k], set);
        auto it = std::find(used.begin(), used.end(), b);
        if (it == used.end()) {
            used.push_back(b);
            it = used.end() - 1;
        }
        which[k] = static_cast<std::size_t>(it - used.begin());
    }
    for (const auto *b : used) {
        for (double c : b->raw) {
            if (!(c >= 0.0)) throw Error(ErrorCode::InvalidArgument, "counts must be nonnegative");
        }
    }

    const std::uint64_t n_chunks = (opt.samples + opt.chunk - 1) / opt.chunk;
    std::vector<double> values(opt.samples, std::numeric_limits<double>::quiet_NaN());
    auto run_chunk = [&](std::uint64_t c) {
        std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(c)));
        const std::uint64_t begin = c * opt.chunk;
        const std::uint64_t end = std::min(opt.samples, begin + opt.chunk);
        std::vector<std::array<double, 16>> norm(used.size());
        std::vector<detail::PoissonSampler> dist;
        for (const auto *b : used)
            for (double c0 : b->raw) dist.emplace_back(c0);
        for (std::uint64_t s = begin; s < end; ++s) {
            bool ok = true;
            for (std::size_t u = 0; u < used.size(); ++u) {
                double total = 0.0;
                for (std::size_t k = 0; k < 16; ++k) {
                    const double draw = dist[u * 16 + k](rng);
                    norm[u][k] = draw * used[u]->correction;
                    total += norm[u][k];
                }
                if (!(total > 0.0)) {
                    ok = false;
                    continue;
                }
                for (double &v : norm[u]) v /= total;
            }
            if (!ok) continue;
            double sum = 0.0;
            for (std::size_t k = 0; k < 6; ++k) sum += parity_expectation(cluster_stabilizers()[k].ops, norm[which[k]]);
            values[s] = 2.0 - 0.5 * sum;
        }
    };
    unsigned nt = opt.threads != 0 ? opt.threads : std::max(1U, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::uint64_t>(nt, n_chunks));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::uint64_t c = t; c < n_chunks; c += nt) run_chunk(c);
        });
    }
    for (auto &th : pool) th.join();

    MonteCarloResult r;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (std::isnan(v)) continue;
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++r.samples;
    }
    if (r.samples == 0) throw Error(ErrorCode::InvalidArgument, "no Monte-Carlo sample had counts in every basis");
    r.mean = sum / static_cast<double>(r.samples);
    double ss = 0.0;
    for (double v : values) {
        if (!std::isnan(v)) ss += (v - r.mean) * (v - r.mean);
    }
    r.stderr_ = r.samples > 1 ? std::sqrt(ss / static_cast<double>(r.samples - 1)) : 0.0;
    if (hi == lo) {
        lo -= 0.5e-6;
        hi += 0.5e-6;
    }
    r.histogram = Histogram{lo, hi, std::vector<std::uint64_t>(opt.bins, 0)};
    for (double v : values) {
        if (std::isnan(v)) continue;
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(opt.bins));
        ++r.histogram.counts[std::min(b, opt.bins - 1)];
    }
    return r;
}

/**
 * Pairs per setting for which the Monte-Carlo witness error reaches the
 * target: a pilot on expected counts at pilot_pairs, scaled by the Poisson
 * law σ ∝ 1/√N.
 */
inline std::uint64_t pairs_for_target_stderr(const JointTwoPhotonState &state, const SegmentSchedule &schedule,
                                             const DetectorModel &detector, const MeasurementModel &model,
                                             double target, std::uint64_t seed, std::uint64_t pilot_pairs = 100000,
                                             std::uint64_t mc_samples = 100000) {
    if (!(target > 0.0)) throw Error(ErrorCode::InvalidArgument, "target error must be positive");
    SamplingOptions so;
    so.exact = true;
    so.pairs_per_setting = pilot_pairs;
    const auto set = extract_projections(sample_coincidences(state, schedule, detector, model, so, seed),
                                         model.levels, state.grid());
    MonteCarloOptions mo;
    mo.samples = mc_samples;
    const double s0 = monte_carlo_error(set, seed, mo).stderr_;
    const double n = static_cast<double>(pilot_pairs) * (s0 / target) * (s0 / target);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(n)));
}

inline constexpr double kChshVisibility = 1.0 / std::numbers::sqrt2;

struct InterferenceFit {
    std::vector<double> alphas;
    std::vector<double> rates;
    int k = 2;
    double visibility = 0.0;
    double phase_offset = 0.0;
    double offset = 0.0;
    int best_k = 2;
    double best_visibility = 0.0;
    bool chsh_pass = false;
    bool k_mismatch = false;
};

/**
 * Fits rates ≈ A (1 + V cos(kα + φ₀)). Needs at least eight distinct alphas
 * whose uniform-sampling extent covers one period 2π/k, else InsufficientScan.
 * Also fits k = 1 and k = 2 and reports the lower-residual one.
 */
inline InterferenceFit fit_interference(const std::vector<double> &alphas, const std::vector<double> &rates,
                                        int k = 2) {
    if (alphas.size() != rates.size()) throw Error(ErrorCode::LengthMismatch, "alphas and rates differ in length");
    if (k <= 0) throw Error(ErrorCode::InvalidArgument, "harmonic order must be positive");
    std::vector<double> distinct = alphas;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 8) throw Error(ErrorCode::InsufficientScan, "a fringe fit needs at least eight phases");
    const double n = static_cast<double>(distinct.size());
    const double extent = (distinct.back() - distinct.front()) * n / (n - 1.0);
    if (extent < 2.0 * std::numbers::pi / k - 1e-9) {
        throw Error(ErrorCode::InsufficientScan, "phase scan does not cover a full fringe period");
    }
    InterferenceFit out;
    out.alphas = alphas;
    out.rates = rates;
    out.k = k;
    const HarmonicFit f = fit_harmonic(alphas, rates, k);
    out.visibility = f.visibility();
    out.phase_offset = f.phase();
    out.offset = f.offset;
    out.chsh_pass = out.visibility > kChshVisibility;

    out.best_k = k;
    out.best_visibility = out.visibility;
    double best_res = f.residual_rms;
    for (int kk : {1, 2}) {
        if (kk == k) continue;
        const double ext_needed = 2.0 * std::numbers::pi / kk;
        if (extent < ext_needed - 1e-9) continue;
        const HarmonicFit g = fit_harmonic(alphas, rates, kk);
        if (g.residual_rms < best_res - 1e-12 * std::max(1.0, std::abs(f.offset))) {
            best_res = g.residual_rms;
            out.best_k = kk;
            out.best_visibility = g.visibility();
        }
    }
    out.k_mismatch = out.best_k != k;
    return out;
}

/// A two-qubit XY-plane projection: both photons rotated on one level, the
/// other level read in Z with the given digit on both photons.
struct FringeProjection {
    std::string name;
    std::string rotated_level;
    int z_digit = 0;
};

inline std::vector<FringeProjection> default_fringe_projections(const LevelSpec &levels) {
    if (levels.size() != 2) throw Error(ErrorCode::UnsupportedLevels, "fringe projections are defined for two levels");
    const std::string outer = levels.levels[0].name;
    const std::string inner = levels.levels[1].name;
    return {FringeProjection{"a" + outer + "a" + outer + "0" + inner + "0" + inner, outer, 0},
            FringeProjection{"0" + outer + "0" + outer + "a" + inner + "a" + inner, inner, 0},
            FringeProjection{"a" + outer + "a" + outer + "1" + inner + "1" + inner, outer, 1},
            FringeProjection{"1" + outer + "1" + outer + "a" + inner + "a" + inner, inner, 1}};
}

inline std::vector<double> uniform_alphas(std::size_t n, double span = std::numbers::pi) {
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = span * static_cast<double>(k) / static_cast<double>(n);
    return a;
}

/**
 * Coincidence rate of the projection at each α (same α on both photons),
 * from the cell whose outcome is + on the rotated level and z_digit on the
 * other, followed by a k = 2 fit.
 */
inline InterferenceFit fringe_scan(const JointTwoPhotonState &state, const FringeProjection &proj,
                                   const std::vector<double> &alphas, const DetectorModel &detector,
                                   const MeasurementModel &model, const SamplingOptions &sampling,
                                   std::uint64_t seed) {
    const auto &levels = model.levels;
    const std::size_t rl = *levels.index_of(proj.rotated_level);
    const auto bins = default_layout(levels).t_indices(state.grid());
    std::vector<double> rates;
    rates.reserve(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const auto s = BeamSplitterSetting::rotated(proj.rotated_level, alphas[a]);
        const JointSetting joint{proj.name, s, s};
        const CellGrid g = joint_cell_probabilities(state, joint, detector, model, sampling.signal_offset_ps,
                                                    sampling.idler_offset_ps);
        double p = 0.0;
        for (auto ts : bins) {
            const auto bs = *photon_outcome(s, levels, state.grid(), ts);
            if (bs[rl] != 0 || bs[1 - rl] != proj.z_digit) continue;
            for (auto ti : bins) {
                const auto bi = *photon_outcome(s, levels, state.grid(), ti);
                if (bi[rl] != 0 || bi[1 - rl] != proj.z_digit) continue;
                p += g.at(ts, ti);
            }
        }
        const double mean = p * static_cast<double>(sampling.pairs_per_setting);
        if (sampling.exact) {
            rates.push_back(mean);
        } else {
            std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(a)));
            rates.push_back(mean > 0.0 ? static_cast<double>(std::poisson_distribution<std::int64_t>(mean)(rng)) : 0.0);
        }
    }
    return fit_interference(alphas, rates, 2);
}

/// floor(bandwidth / width) channels × one qubit per stretched bin period, in qubits/s.
inline double multiplex_capacity(double total_bandwidth_ghz, double qubit_width_ghz, double stretched_bin_ns) {
    if (!(total_bandwidth_ghz > 0.0) || !(qubit_width_ghz > 0.0) || !(stretched_bin_ns > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "capacity inputs must be positive");
    }
    const double channels = std::floor(total_bandwidth_ghz / qubit_width_ghz + 1e-12);
    return channels * 1e9 / stretched_bin_ns;
}

}  // namespace tbc
