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


#include "towercov/channel.hpp"
#include "towercov/mimo.hpp"
#include "towercov/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>

using namespace towercov;

namespace
{
Eigen::MatrixXcd iid_channel(Eigen::Index m, Eigen::Index k, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::MatrixXcd h(m, k);
    for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            h(i, j) = complex_normal(rng);
    return h;
}

Eigen::MatrixXd random_gains(int k, std::uint64_t seed)
{
    Rng rng(seed);
    Eigen::MatrixXd g(k, k);
    const double coupling = uniform(rng, 0.001, 0.3);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            g(i, j) = i == j ? uniform(rng, 0.2, 2.0) : coupling * uniform01(rng);
    return g;
}

// Best min-SINR over a uniform grid on the power simplex.
double grid_maxmin(const Eigen::MatrixXd &g, double noise, double total, int steps)
{
    const int k = static_cast<int>(g.rows());
    Eigen::VectorXd p(k);
    double best = 0.0;
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == k - 1)
        {
            p[idx] = total * left / steps;
            if ((p.array() > 0).all())
                best = std::max(best, sinr(g, p, noise).minCoeff());
            return;
        }
        for (int s = 0; s <= left; ++s)
        {
            p[idx] = total * s / steps;
            rec(idx + 1, left - s);
        }
    };
    rec(0, steps);
    return best;
}
} // namespace

TEST(Rzf, DefaultRegularization)
{
    EXPECT_DOUBLE_EQ(rzf_regularization(20, 1e-12, 40), 20 * 1e-12 / 40);
    const auto h = iid_channel(16, 4, 1);
    const auto r = rzf_precode(h, 1e-3, 10);
    EXPECT_DOUBLE_EQ(r.regularization, 4 * 1e-3 / 10);
    for (Eigen::Index k = 0; k < 4; ++k)
        EXPECT_NEAR(r.w.col(k).norm(), 1.0, 1e-12);
}

TEST(Rzf, VanishingRegularizationSuppressesInterference)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto h = iid_channel(64, 8, seed);
        const auto r = rzf_precode(h, 1.0, 1.0, 1e-9);
        const auto g = effective_gains(h, r.w);
        for (Eigen::Index k = 0; k < 8; ++k)
            for (Eigen::Index j = 0; j < 8; ++j)
                if (j != k)
                    EXPECT_LT(10 * std::log10(g(k, j) / g(k, k)), -60.0);
    }
}

TEST(Rzf, LargeRegularizationApproachesMatchedFilter)
{
    const auto h = iid_channel(32, 4, 3);
    const auto r = rzf_precode(h, 1.0, 1.0, 1e9);
    for (Eigen::Index k = 0; k < 4; ++k)
        EXPECT_NEAR(std::abs(r.w.col(k).dot(h.col(k))) / h.col(k).norm(), 1.0, 1e-6);
}

TEST(Rzf, SingleUserLosSnr)
{
    // One user, pure line of sight: SINR = P beta M / noise.
    auto site = SiteConfig::high_tower(1);
    const auto radio = RadioConfig::band(700);
    auto fading = FadingParams::for_scenario(site.scenario);
    fading.rician_k_mean_db = std::numeric_limits<double>::infinity();
    UserDrop drop;
    drop.distance_m = {5000};
    drop.azimuth_deg = {12};
    const auto ch = generate_channel(site, radio, drop, fading, 5);
    const double noise = radio.noise_power_w();
    const auto pre = rzf_precode(ch.h, noise, site.tx_power_w);
    const auto g = effective_gains(ch.h, pre.w);
    const auto alloc = maxmin_power(g, noise, site.tx_power_w);
    const double expected = site.tx_power_w * ch.large_scale_gain[0] * 256 / noise;
    EXPECT_NEAR(10 * std::log10(alloc.common_sinr / expected), 0.0, 0.1);
}

TEST(Rzf, Errors)
{
    EXPECT_THROW(rzf_precode(iid_channel(4, 5, 1), 1, 1), InvalidArgument);
    EXPECT_THROW(rzf_precode(Eigen::MatrixXcd(4, 0), 1, 1), InvalidArgument);
    auto h = iid_channel(4, 2, 1);
    h(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(rzf_precode(h, 1, 1), InvalidArgument);
    EXPECT_THROW(rzf_precode(iid_channel(4, 2, 1), 0, 1), InvalidArgument);
    // Identical users with no regularization: singular Gram matrix.
    Eigen::MatrixXcd dup(4, 2);
    dup.col(0) = iid_channel(4, 1, 2).col(0);
    dup.col(1) = dup.col(0);
    EXPECT_THROW(rzf_precode(dup, 1, 1, 0.0), NumericalError);
    EXPECT_THROW(effective_gains(iid_channel(4, 2, 1), iid_channel(4, 3, 1)), InvalidArgument);
}

TEST(MaxMin, EqualSinrAndFullBudgetOnRandomInstances)
{
    for (std::uint64_t i = 0; i < 1000; ++i)
    {
        const int k = 2 + static_cast<int>(i % 15);
        const auto g = random_gains(k, derive_seed(21, {i}));
        const double noise = 0.01, total = 3.0;
        const auto a = maxmin_power(g, noise, total);
        const auto s = sinr(g, a.p, noise);
        ASSERT_LE((s.maxCoeff() - s.minCoeff()) / s.minCoeff(), 1e-4) << i;
        ASSERT_NEAR(a.p.sum(), total, 1e-6 * total);
        ASSERT_TRUE((a.p.array() > 0).all());
        ASSERT_NEAR(a.common_sinr, s.minCoeff(), 1e-12 * s.minCoeff());
    }
}

TEST(MaxMin, AtLeastAsGoodAsSimplexGridSearch)
{
    for (std::uint64_t i = 0; i < 60; ++i)
    {
        const int k = 2 + static_cast<int>(i % 3);
        const auto g = random_gains(k, derive_seed(22, {i}));
        const double noise = 0.05, total = 1.0;
        const int steps = k == 2 ? 4000 : (k == 3 ? 300 : 80);
        const double grid = grid_maxmin(g, noise, total, steps);
        const auto a = maxmin_power(g, noise, total);
        EXPECT_GE(a.common_sinr, grid * (1 - 1e-3)) << i;
    }
}

TEST(MaxMin, SingleUserUsesWholeBudget)
{
    Eigen::MatrixXd g(1, 1);
    g << 2.0;
    const auto a = maxmin_power(g, 0.5, 3.0);
    EXPECT_NEAR(a.p[0], 3.0, 1e-12);
    EXPECT_NEAR(a.common_sinr, 12.0, 1e-9);
}

TEST(MaxMin, OrthogonalUsersAnalytic)
{
    // No interference: SINR_k = p_k g_k / n, equal SINR gives p_k proportional to 1/g_k.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
    g.diagonal() << 1.0, 2.0, 4.0;
    const auto a = maxmin_power(g, 1.0, 7.0);
    const double t = 7.0 / (1.0 + 0.5 + 0.25);
    EXPECT_NEAR(a.common_sinr, t, 1e-9 * t);
    EXPECT_NEAR(a.p[0], t, 1e-9);
    EXPECT_NEAR(a.p[2], t / 4, 1e-9);
}

TEST(MaxMin, Errors)
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
    g(1, 1) = 0.0;
    EXPECT_THROW(maxmin_power(g, 1, 1), DegenerateChannel);
    EXPECT_THROW(maxmin_power(Eigen::MatrixXd::Identity(2, 3), 1, 1), InvalidArgument);
    EXPECT_THROW(maxmin_power(Eigen::MatrixXd::Identity(2, 2), 0, 1), InvalidArgument);
    Eigen::MatrixXd neg = Eigen::MatrixXd::Identity(2, 2);
    neg(0, 1) = -1;
    EXPECT_THROW(maxmin_power(neg, 1, 1), InvalidArgument);
    MaxMinOptions opt;
    opt.max_iterations = 3;
    EXPECT_THROW(maxmin_power(Eigen::MatrixXd::Identity(2, 2), 1, 1, opt), NumericalError);
}

TEST(Rates, FormulaAndMonotonicity)
{
    const auto radio = RadioConfig::band(1800);
    Eigen::VectorXd s(3);
    s << 0.0, 1.0, 7.0;
    const auto r = user_rates(s, radio);
    EXPECT_DOUBLE_EQ(r.rate_bps[0], 0.0);
    EXPECT_NEAR(r.rate_bps[1], 0.95 * 20e6, 1e-6);
    EXPECT_NEAR(r.rate_bps[2], 0.95 * 20e6 * 3, 1e-6);
    Eigen::VectorXd bad(1);
    bad << -1;
    EXPECT_THROW(user_rates(bad, radio), InvalidArgument);
}
