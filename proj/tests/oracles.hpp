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

// Independent reference implementations used only by tests.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

/// J_n(x) by the ascending power series, summed in long double.
inline double bessel_series(int n, double x) {
    const bool neg = n < 0;
    const int an = neg ? -n : n;
    long double half = static_cast<long double>(x) / 2.0L;
    long double term = 1.0L;
    for (int k = 1; k <= an; ++k) term *= half / static_cast<long double>(k);
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= -half * half / (static_cast<long double>(k) * static_cast<long double>(k + an));
        sum += term;
        if (std::abs(term) < 1e-30L * std::abs(sum) && k > an) break;
    }
    double v = static_cast<double>(sum);
    return (neg && (an % 2) != 0) ? -v : v;
}

/// Dense vector over a window of single-photon modes: nt time bins starting
/// at t0 and nf frequency bins starting at f0.
struct DenseSpace {
    std::int64_t t0 = 0;
    int nt = 4;
    std::int64_t f0 = -4;
    int nf = 9;

    int dim() const { return nt * nf; }
    bool contains(std::int64_t t, std::int64_t f) const {
        return t >= t0 && t < t0 + nt && f >= f0 && f < f0 + nf;
    }
    int index(std::int64_t t, std::int64_t f) const {
        return static_cast<int>((t - t0) * nf + (f - f0));
    }
    std::int64_t t_of(int i) const { return t0 + i / nf; }
    std::int64_t f_of(int i) const { return f0 + i % nf; }
};

using Matrix = std::vector<std::vector<cd>>;  // [out][in]

/// Applies U to the signal (photon 0) or idler (photon 1) of a dense
/// two-photon vector psi[s * d + i].
inline std::vector<cd> apply_dense(const std::vector<cd> &psi, const Matrix &u, int photon, int d) {
    std::vector<cd> out(psi.size(), cd{});
    for (int s = 0; s < d; ++s) {
        for (int i = 0; i < d; ++i) {
            const cd a = psi[static_cast<std::size_t>(s * d + i)];
            if (a == cd{}) continue;
            for (int o = 0; o < d; ++o) {
                if (photon == 0) {
                    out[static_cast<std::size_t>(o * d + i)] += u[static_cast<std::size_t>(o)][static_cast<std::size_t>(s)] * a;
                } else {
                    out[static_cast<std::size_t>(s * d + o)] += u[static_cast<std::size_t>(o)][static_cast<std::size_t>(i)] * a;
                }
            }
        }
    }
    return out;
}

/// Ideal four-qubit cluster amplitudes indexed by T_s T_i t_s t_i (bit 3..0).
inline std::array<cd, 16> cluster_qubits() {
    std::array<cd, 16> v{};
    v[0b0000] = 0.5;
    v[0b0011] = 0.5;
    v[0b1100] = 0.5;
    v[0b1111] = -0.5;
    return v;
}

/// 16x16 density matrix.
using Density = std::array<std::array<cd, 16>, 16>;

inline Density pure_density(const std::array<cd, 16> &v) {
    Density rho{};
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) rho[a][b] = v[a] * std::conj(v[b]);
    return rho;
}

inline Density white_noise_mix(const Density &rho, double p) {
    Density out{};
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) out[a][b] = (1.0 - p) * rho[a][b] + (a == b ? p / 16.0 : 0.0);
    return out;
}

/// Tr(ρ P) for a Pauli string over {'1','Z','X'}; qubit 0 is the leftmost
/// character and the most significant bit of the index.
inline double pauli_expectation(const Density &rho, const char *ops) {
    // P|b⟩ = phase(b) |b ^ flip|
    double acc = 0.0;
    for (int b = 0; b < 16; ++b) {
        int flip = 0;
        double sign = 1.0;
        for (int q = 0; q < 4; ++q) {
            const int bit = (b >> (3 - q)) & 1;
            if (ops[q] == 'X') flip |= 1 << (3 - q);
            if (ops[q] == 'Z' && bit) sign = -sign;
        }
        // Tr(ρP) = Σ_b ⟨b|ρ P|b⟩ = Σ_b ρ[b][b^flip] sign(b)
        acc += (rho[b][b ^ flip] * sign).real();
    }
    return acc;
}

/// Local measurement vector for outcome bit on one qubit: Z → |bit⟩,
/// X → (|0⟩ ± |1⟩)/√2, R → (|0⟩ ± e^{−iα}|1⟩)/√2 (bit 0 is +).
inline std::array<cd, 2> local_vector(char basis, int bit, double alpha) {
    const double r = 1.0 / std::numbers::sqrt2;
    const double s = bit == 0 ? 1.0 : -1.0;
    switch (basis) {
        case 'Z':
            return bit == 0 ? std::array<cd, 2>{1.0, 0.0} : std::array<cd, 2>{0.0, 1.0};
        case 'X':
            return {r, s * r};
        default:
            return {r, s * r * std::polar(1.0, -alpha)};
    }
}

/// Outcome probabilities ⟨v_k|ρ|v_k⟩ of a product measurement, k indexed
/// like the qubit basis.
inline std::array<double, 16> basis_probabilities(const Density &rho, const char *basis, double alpha = 0.0) {
    std::array<double, 16> out{};
    for (int k = 0; k < 16; ++k) {
        std::array<cd, 16> v{};
        for (int b = 0; b < 16; ++b) {
            cd c = 1.0;
            for (int q = 0; q < 4; ++q) {
                const auto lv = local_vector(basis[q], (k >> (3 - q)) & 1, alpha);
                c *= lv[static_cast<std::size_t>((b >> (3 - q)) & 1)];
            }
            v[static_cast<std::size_t>(b)] = c;
        }
        cd acc{};
        for (int a = 0; a < 16; ++a)
            for (int b = 0; b < 16; ++b) acc += std::conj(v[a]) * rho[a][b] * v[b];
        out[static_cast<std::size_t>(k)] = acc.real();
    }
    return out;
}

/// Standard normal CDF.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace oracle
