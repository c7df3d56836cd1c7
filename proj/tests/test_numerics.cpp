// Copyright 2026 The nml Authors
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

#include "nml/numerics.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "nml/readout.hpp"
#include "nml/rng.hpp"
#include "oracles.hpp"

using namespace nml;
using namespace nml::numerics;

TEST(LogCosh, SmallAndLargeArguments) {
    for (double x : {0.0, 1e-9, 0.3, -2.0, 10.0}) {
        EXPECT_NEAR(log_cosh(x), std::log(std::cosh(x)), 1e-14 * std::max(1.0, std::abs(x)));
    }
    EXPECT_NEAR(log_cosh(800.0), 800.0 - std::log(2.0), 1e-12);
    EXPECT_NEAR(log_cosh(-2000.0), 2000.0 - std::log(2.0), 1e-12);
}

TEST(LogAddExp, FiniteAndInfinite) {
    EXPECT_NEAR(log_add_exp(0, 0), std::log(2.0), 1e-15);
    EXPECT_NEAR(log_add_exp(1000, 1000), 1000 + std::log(2.0), 1e-12);
    double ninf = -std::numeric_limits<double>::infinity();
    EXPECT_EQ(log_add_exp(ninf, 3.0), 3.0);
    EXPECT_EQ(log_add_exp(-1.0, ninf), -1.0);
}

TEST(LogSumExp, StableForLargeInputs) {
    std::vector<double> xs{1000, 1000, 1000};
    EXPECT_NEAR(log_sum_exp(xs), 1000 + std::log(3.0), 1e-12);
    std::vector<double> small{std::log(0.25), std::log(0.75)};
    EXPECT_NEAR(log_sum_exp(small), 0.0, 1e-15);
    std::vector<double> empty;
    EXPECT_EQ(log_sum_exp(empty), -std::numeric_limits<double>::infinity());
}

TEST(SignedLogSumExp, Signs) {
    std::vector<double> logs{std::log(3.0), std::log(5.0)};
    std::vector<int> signs{1, -1};
    int sign = 0;
    double v = signed_log_sum_exp(logs, signs, sign);
    EXPECT_EQ(sign, -1);
    EXPECT_NEAR(v, std::log(2.0), 1e-14);
    std::vector<int> equal{1, 1};
    EXPECT_NEAR(signed_log_sum_exp(logs, equal, sign), std::log(8.0), 1e-14);
    EXPECT_EQ(sign, 1);
    std::vector<int> bad{1};
    EXPECT_THROW(signed_log_sum_exp(logs, bad, sign), ContractError);
}

TEST(Integrate, AgreesWithSimpsonOracle) {
    auto f = [](double x) { return std::exp(-x * x) * std::cos(3 * x); };
    double ref = oracle::simpson(f, 0, 4, 20000);
    EXPECT_NEAR(integrate(f, 0, 4, 1e-12).value, ref, 1e-11);
    EXPECT_NEAR(integrate([](double x) { return x * x; }, 0, 3, 1e-14).value, 9.0, 1e-12);
    EXPECT_EQ(integrate(f, 2, 2, 1e-10).value, 0.0);
}

TEST(Integrate, ShortIntervalsMeetRelativeTolerance) {
    for (double width : {1e-3, 1e-6, 1e-9}) {
        int calls = 0;
        auto f = [&](double x) {
            ++calls;
            return std::cos(x);
        };
        auto r = integrate(f, 0.0, width, 1e-12);
        EXPECT_NEAR(r.value, std::sin(width), 1e-12 * width);
        EXPECT_LE(r.error_estimate, 1e-12 * r.value);
        EXPECT_LT(calls, 1000) << width;
    }
}

TEST(Integrate, NonFiniteThrows) {
    EXPECT_THROW(integrate([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0, 1, 1e-8),
                 NumericalError);
}

TEST(BisectRoot, FindsRootAndRejectsBadBracket) {
    double r = bisect_root([](double x) { return x * x - 2; }, 0, 2, 1e-14);
    EXPECT_NEAR(r, std::sqrt(2.0), 1e-13);
    EXPECT_EQ(bisect_root([](double x) { return x - 1; }, 1, 3, 1e-12), 1.0);
    EXPECT_THROW(bisect_root([](double x) { return x * x + 1; }, -1, 1, 1e-10), NumericalError);
}

TEST(Rng, SplitmixReferenceValues) {
    uint64_t state = 0;
    EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(splitmix64(state), 0x06C45D188009454FULL);
}

TEST(Rng, StreamSeedsArePureAndDistinct) {
    EXPECT_EQ(derive_stream_seed(7, 3), derive_stream_seed(7, 3));
    std::set<uint64_t> seen;
    for (uint64_t m : {0ULL, 1ULL, 7ULL}) {
        for (uint64_t i = 0; i < 1000; ++i) {
            seen.insert(derive_stream_seed(m, i));
        }
    }
    EXPECT_EQ(seen.size(), 3000u);
}

TEST(Rng, UniformRangeAndMean) {
    Rng a = Rng::for_stream(5, 1), b = Rng::for_stream(5, 1);
    double sum = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(Readout, RoundTrip) {
    for (auto r : {Readout::Complete, Readout::None, Readout::Partial}) {
        EXPECT_EQ(parse_readout(to_string(r)), r);
    }
    EXPECT_THROW(parse_readout("full"), ContractError);
}
