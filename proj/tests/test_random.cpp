// SPDX-License-Identifier: Apache-2.0
//
// towercov: coverage analysis for massive-MIMO base stations on tall towers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "towercov/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace towercov;

TEST(DeriveSeed, DependsOnPathNotOrderOfCalls)
{
    const auto a = derive_seed(1, {2, 3});
    const auto b = derive_seed(1, {3, 2});
    const auto c = derive_seed(1, {2, 3});
    EXPECT_EQ(a, c);
    EXPECT_NE(a, b);
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
    EXPECT_NE(derive_seed(1, {}), derive_seed(1, {0}));
}

TEST(DeriveSeed, NoCollisionsOnSmallGrid)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 200; ++i)
        for (std::uint64_t j = 0; j < 200; ++j)
            seen.insert(derive_seed(7, {i, j}));
    EXPECT_EQ(seen.size(), 40000u);
}

TEST(Samplers, Moments)
{
    Rng rng(derive_seed(11, {}));
    const int n = 200000;
    double s = 0, s2 = 0, l = 0, l2 = 0, u = 0, c2 = 0;
    for (int i = 0; i < n; ++i)
    {
        const double x = standard_normal(rng);
        s += x;
        s2 += x * x;
        const double y = laplacian(rng, 3.0);
        l += y;
        l2 += y * y;
        u += uniform01(rng);
        c2 += std::norm(complex_normal(rng));
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
    EXPECT_NEAR(l / n, 0.0, 0.03);
    EXPECT_NEAR(std::sqrt(l2 / n), 3.0, 0.05);
    EXPECT_NEAR(u / n, 0.5, 0.005);
    EXPECT_NEAR(c2 / n, 1.0, 0.01);
}

TEST(Samplers, UniformInHalfOpenUnitInterval)
{
    Rng rng(5);
    for (int i = 0; i < 100000; ++i)
    {
        const double x = uniform01(rng);
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
    }
}

TEST(Samplers, ReproducibleStreams)
{
    Rng a(derive_seed(3, {1})), b(derive_seed(3, {1}));
    for (int i = 0; i < 1000; ++i)
        ASSERT_EQ(standard_normal(a), standard_normal(b));
}
