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


#ifndef TOWERCOV_COVERAGE_HPP
#define TOWERCOV_COVERAGE_HPP

#include "channel.hpp"
#include "errors.hpp"
#include "mimo.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace towercov
{

enum class SiteType
{
    legacy,
    high_tower
};

inline std::string to_string(SiteType t) { return t == SiteType::legacy ? "legacy" : "high-tower"; }

inline SiteType site_type_from_string(const std::string &s)
{
    if (s == "legacy")
        return SiteType::legacy;
    if (s == "high-tower" || s == "high")
        return SiteType::high_tower;
    throw InvalidConfig("unknown site type '" + s + "' (expected legacy or high-tower)");
}

struct CoverageQuery
{
    SiteType type = SiteType::legacy;
    SiteConfig site = SiteConfig::legacy();
    RadioConfig radio;
    FadingParams fading = FadingParams::for_scenario(Scenario::rma_nlos);
    int users = 20;
    int trials = 100;
    double satisfaction_threshold = 0.95;
    double grid_km = 0.1;
    double max_distance_km = 200.0;
    double rx_height_m = 8.0;
    std::uint64_t master_seed = 1;
    int jobs = 1; // does not affect results

    static CoverageQuery make(SiteType type, double carrier_mhz, int users, int polarizations)
    {
        CoverageQuery q;
        q.type = type;
        q.site = type == SiteType::legacy ? SiteConfig::legacy(polarizations) : SiteConfig::high_tower(polarizations);
        q.fading = FadingParams::for_scenario(q.site.scenario);
        q.radio = RadioConfig::band(carrier_mhz);
        q.users = users;
        return q;
    }

    void validate() const
    {
        site.validate(rx_height_m);
        radio.validate();
        fading.validate();
        if (users < 1)
            throw InvalidConfig("coverage: at least one user required");
        if (users > site.array.element_count())
            throw InvalidConfig("coverage: more users than antennas");
        if (trials < 1)
            throw InvalidConfig("coverage: trials must be at least 1");
        if (!(satisfaction_threshold > 0.0 && satisfaction_threshold < 1.0))
            throw InvalidConfig("coverage: satisfaction threshold must lie in (0, 1)");
        if (!(grid_km > 0.0) || !(max_distance_km >= grid_km))
            throw InvalidConfig("coverage: invalid distance grid");
    }
};

struct DistanceEvaluation
{
    double distance_km = 0.0;
    std::size_t satisfied = 0;
    std::size_t total = 0;
    std::size_t failed_drops = 0; // drops whose precoder or power control failed numerically
    double fraction = 0.0;
    double half_width = 0.0; // 95% Wilson interval
};

struct CoverageResult
{
    double d_cov_km = 0.0;
    std::vector<DistanceEvaluation> curve; // sorted by distance
    std::string diagnostic;
};

// Half-width of the 95% Wilson score interval for a binomial proportion.
inline double wilson_half_width(std::size_t successes, std::size_t n, double z = 1.959963984540054)
{
    if (n == 0)
        return 0.5;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    return z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
}

// Users uniform by area on the annulus between the minimum distance and d.
// Each user draws from its own stream so larger drops extend smaller ones.
inline UserDrop draw_users(int users, double radius_m, double rx_height_m, std::uint64_t drop_seed)
{
    UserDrop drop;
    drop.rx_height_m = rx_height_m;
    const double r0 = min_drop_distance_m;
    const double r1 = std::max(radius_m, r0);
    for (int k = 0; k < users; ++k)
    {
        Rng rng(derive_seed(drop_seed, {0, static_cast<std::uint64_t>(k)}));
        const double u = uniform01(rng);
        drop.distance_m.push_back(std::sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0)));
        drop.azimuth_deg.push_back(uniform(rng, 0.0, 360.0));
    }
    return drop;
}

struct DropOutcome
{
    std::size_t satisfied = 0;
    bool failed = false;
    double common_sinr = 0.0;
};

// One Monte-Carlo drop: channel, RZF beams, max-min powers, rate test against the target.
inline DropOutcome simulate_drop(const CoverageQuery &q, const UserDrop &drop, std::uint64_t channel_seed)
{
    const ChannelMatrix ch = generate_channel(q.site, q.radio, drop, q.fading, channel_seed);
    const double noise = q.radio.noise_power_w();
    const double power = q.site.tx_power_w;
    DropOutcome out;
    if (!ch.h.allFinite()) // gains overflowed
    {
        out.failed = true;
        return out;
    }
    try
    {
        const PrecodeResult pre = rzf_precode(ch.h, noise, power);
        const Eigen::MatrixXd g = effective_gains(ch.h, pre.w);
        const PowerAllocation alloc = maxmin_power(g, noise, power);
        const RateReport rates = user_rates(alloc, g, noise, q.radio);
        out.common_sinr = alloc.common_sinr;
        for (Eigen::Index k = 0; k < rates.rate_bps.size(); ++k)
            if (rates.rate_bps[k] >= q.radio.target_rate_bps)
                ++out.satisfied;
    }
    catch (const Error &e)
    {
        if (e.error_class() != ErrorClass::numerical)
            throw;
        out.failed = true;
    }
    return out;
}

inline std::int64_t grid_index(double d_km, double grid_km) { return std::llround(d_km / grid_km); }

// Pooled fraction of user instances meeting the target rate over `trials` drops on the
// disk of radius d. Drop t at grid index i uses seed (master, i, t).
inline DistanceEvaluation evaluate_distance(const CoverageQuery &q, double d_km)
{
    q.validate();
    if (!(d_km > 0.0) || !std::isfinite(d_km))
        throw InvalidArgument("coverage: distance must be positive");
    const auto index = static_cast<std::uint64_t>(std::max<std::int64_t>(grid_index(d_km, q.grid_km), 0));

    std::vector<DropOutcome> outcomes(static_cast<std::size_t>(q.trials));
    parallel_for(outcomes.size(), q.jobs, [&](std::size_t t) {
        const std::uint64_t drop_seed = derive_seed(q.master_seed, {index, static_cast<std::uint64_t>(t)});
        const UserDrop drop = draw_users(q.users, d_km * 1000.0, q.rx_height_m, drop_seed);
        outcomes[t] = simulate_drop(q, drop, derive_seed(drop_seed, {1}));
    });

    DistanceEvaluation ev;
    ev.distance_km = d_km;
    for (const auto &o : outcomes)
    {
        ev.satisfied += o.satisfied;
        ev.failed_drops += o.failed ? 1 : 0;
    }
    if (ev.failed_drops == outcomes.size())
        throw NumericalError("coverage: every drop at " + std::to_string(d_km) + " km failed numerically");
    ev.total = static_cast<std::size_t>(q.trials) * static_cast<std::size_t>(q.users);
    ev.fraction = static_cast<double>(ev.satisfied) / static_cast<double>(ev.total);
    ev.half_width = wilson_half_width(ev.satisfied, ev.total);
    return ev;
}

// Largest grid distance whose satisfied fraction meets the threshold: geometric scan
// outward from one grid step until the first failure, then bisection on the grid
// between the last pass and that failure.
inline CoverageResult coverage_distance(const CoverageQuery &q)
{
    q.validate();
    std::map<std::int64_t, DistanceEvaluation> seen;
    auto passes = [&](std::int64_t i) {
        auto it = seen.find(i);
        if (it == seen.end())
            it = seen.emplace(i, evaluate_distance(q, static_cast<double>(i) * q.grid_km)).first;
        return it->second.fraction >= q.satisfaction_threshold;
    };

    CoverageResult res;
    const std::int64_t max_index = std::max<std::int64_t>(1, grid_index(q.max_distance_km, q.grid_km));
    if (!passes(1))
    {
        res.d_cov_km = 0.0;
        res.diagnostic = "threshold not met even at the smallest grid distance";
    }
    else
    {
        std::int64_t lo = 1;
        std::optional<std::int64_t> hi;
        while (!hi)
        {
            if (lo == max_index)
                break;
            const std::int64_t next = std::min(max_index, std::max(lo + 1, (lo * 3 + 1) / 2));
            if (passes(next))
                lo = next;
            else
                hi = next;
        }
        if (!hi)
            res.diagnostic = "threshold still met at the maximum search distance";
        else
            while (*hi - lo > 1)
            {
                const std::int64_t mid = lo + (*hi - lo) / 2;
                if (passes(mid))
                    lo = mid;
                else
                    hi = mid;
            }
        res.d_cov_km = static_cast<double>(lo) * q.grid_km;
    }
    for (const auto &[i, ev] : seen)
        res.curve.push_back(ev);
    return res;
}

struct CoverageRun
{
    CoverageQuery query;
    std::optional<CoverageResult> result;
    std::string error;
};

// One output line per (type, K, f_c, duplex, B) with single- and dual-polarized distances.
struct CoverageRow
{
    SiteType type = SiteType::legacy;
    int users = 0;
    double carrier_mhz = 0.0;
    Duplex duplex = Duplex::fdd;
    double bandwidth_mhz = 0.0;
    std::optional<double> dcov_single_km;
    std::optional<double> dcov_dual_km;
    std::string error;
};

struct CoverageTable
{
    std::vector<CoverageRow> rows;
    std::vector<CoverageRun> runs;
};

// Runs every query; a failing query leaves its cell empty and records the error on the row.
inline CoverageTable coverage_table(const std::vector<CoverageQuery> &queries)
{
    if (queries.empty())
        throw InvalidArgument("coverage_table: no queries");

    CoverageTable table;
    for (const auto &q : queries)
    {
        CoverageRun run{q, std::nullopt, {}};
        try
        {
            run.result = coverage_distance(q);
        }
        catch (const Error &e)
        {
            run.error = e.what();
        }
        table.runs.push_back(std::move(run));
    }

    using Key = std::tuple<int, double, int, int, double>;
    std::map<Key, CoverageRow> grouped;
    for (const auto &run : table.runs)
    {
        const auto &q = run.query;
        const Key key{static_cast<int>(q.type), q.radio.carrier_frequency_hz / 1e6, q.users,
                      static_cast<int>(q.radio.duplex), q.radio.bandwidth_hz / 1e6};
        auto &row = grouped[key];
        row.type = q.type;
        row.users = q.users;
        row.carrier_mhz = q.radio.carrier_frequency_hz / 1e6;
        row.duplex = q.radio.duplex;
        row.bandwidth_mhz = q.radio.bandwidth_hz / 1e6;
        if (!run.error.empty())
        {
            row.error += (row.error.empty() ? "" : "; ") + run.error;
            continue;
        }
        if (q.site.array.polarizations == 1)
            row.dcov_single_km = run.result->d_cov_km;
        else
            row.dcov_dual_km = run.result->d_cov_km;
    }
    for (auto &[key, row] : grouped)
        table.rows.push_back(row);
    return table;
}

// Table rows for every combination of the given site types, bands and user loads, with
// both polarization options.
inline std::vector<CoverageQuery> standard_queries(const std::vector<SiteType> &types,
                                                   const std::vector<double> &carriers_mhz,
                                                   const std::vector<int> &user_counts)
{
    std::vector<CoverageQuery> qs;
    for (auto t : types)
        for (double f : carriers_mhz)
            for (int k : user_counts)
                for (int pol : {1, 2})
                    qs.push_back(CoverageQuery::make(t, f, k, pol));
    return qs;
}

} // namespace towercov

#endif
