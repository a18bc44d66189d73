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

#include "oracles.hpp"
#include "tbcluster/bessel.hpp"

namespace {

TEST(Bessel, MatchesPowerSeries) {
    for (double x : {1e-6, 0.1, 0.5, 1.0, 1.4346956508, 2.0, 3.7, 5.0, 8.5, 12.0}) {
        const auto j = tbc::bessel_j_orders(x, 12);
        for (int n = 0; n <= 12; ++n) {
            EXPECT_NEAR(j[static_cast<std::size_t>(n)], oracle::bessel_series(n, x), 1e-13) << "n=" << n << " x=" << x;
        }
    }
}

TEST(Bessel, MatchesStandardLibrary) {
    for (double x : {0.25, 1.0, 2.0, 6.0, 20.0}) {
        for (int n = 0; n <= 10; ++n) {
            EXPECT_NEAR(tbc::bessel_j(n, x), std::cyl_bessel_j(static_cast<double>(n), x), 1e-12);
        }
    }
}

TEST(Bessel, ReferenceValues) {
    EXPECT_NEAR(tbc::bessel_j(0, 1.0), 0.7651976866, 1e-10);
    EXPECT_NEAR(tbc::bessel_j(1, 1.0), 0.4400505857, 1e-10);
    EXPECT_NEAR(tbc::bessel_j(2, 2.0), 0.3528340286, 1e-10);
    EXPECT_NEAR(tbc::bessel_j(0, 2.404825557695773), 0.0, 1e-12);
}

TEST(Bessel, ZeroArgument) {
    const auto j = tbc::bessel_j_orders(0.0, 4);
    EXPECT_EQ(j[0], 1.0);
    for (int n = 1; n <= 4; ++n) EXPECT_EQ(j[static_cast<std::size_t>(n)], 0.0);
}

TEST(Bessel, NegativeOrderAndArgument) {
    for (int n = 1; n <= 5; ++n) {
        const double sign = (n % 2) ? -1.0 : 1.0;
        EXPECT_NEAR(tbc::bessel_j(-n, 1.7), sign * tbc::bessel_j(n, 1.7), 1e-15);
        EXPECT_NEAR(tbc::bessel_j(n, -1.7), sign * tbc::bessel_j(n, 1.7), 1e-15);
    }
}

TEST(Bessel, SumOfSquaresIsOne) {
    for (double x : {0.3, 1.4346956508, 2.0}) {
        const auto j = tbc::bessel_j_orders(x, 8);
        double s = j[0] * j[0];
        for (int n = 1; n <= 8; ++n) s += 2.0 * j[static_cast<std::size_t>(n)] * j[static_cast<std::size_t>(n)];
        EXPECT_NEAR(s, 1.0, 1e-10);
    }
}

}  // namespace
