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


#include "towercov/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace towercov;

namespace
{
std::filesystem::path temp_file(const std::string &name, const std::string &content)
{
    const auto p = std::filesystem::temp_directory_path() / ("towercov_cfg_" + name);
    std::ofstream(p) << content;
    return p;
}

RunConfig apply(const std::string &text)
{
    RunConfig cfg;
    apply_config_json(cfg, json::parse(text));
    return cfg;
}
} // namespace

TEST(Config, DefaultsDescribeStandardSweep)
{
    const RunConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.coverage_queries().size(), 36u);
    EXPECT_EQ(cfg.array.m_h, 32);
    EXPECT_EQ(cfg.array.m_v, 8);
    EXPECT_EQ(cfg.array.spacing, 0.5);
    EXPECT_EQ(cfg.legacy_site.tx_height_m, 25.0);
    EXPECT_EQ(cfg.high_tower_site.tx_height_m, 150.0);
    EXPECT_EQ(cfg.legacy_site.scenario, Scenario::rma_nlos);
    EXPECT_EQ(cfg.high_tower_site.scenario, Scenario::rma_los);
    EXPECT_EQ(cfg.band(700).bandwidth_mhz, 10.0);
    EXPECT_EQ(cfg.band(1800).bandwidth_mhz, 20.0);
    EXPECT_EQ(cfg.band(3500).bandwidth_mhz, 100.0);
    EXPECT_EQ(cfg.band(3500).duplex, Duplex::tdd);
    EXPECT_THROW(cfg.band(2600), InvalidConfig);
}

TEST(Config, QueryCarriesBandAndPolarization)
{
    const RunConfig cfg;
    const auto q = cfg.query(SiteType::high_tower, 1800, 50, 2);
    EXPECT_EQ(q.radio.carrier_frequency_hz, 1800e6);
    EXPECT_EQ(q.radio.bandwidth_hz, 20e6);
    EXPECT_EQ(q.site.array.polarizations, 2);
    EXPECT_EQ(q.site.array.element_count(), 512);
    EXPECT_EQ(q.users, 50);
    EXPECT_EQ(q.fading.n_clusters, cfg.fading_los.n_clusters);
}

TEST(Config, UnknownKeysRejected)
{
    EXPECT_THROW(apply(R"({"sead": 3})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"coverage": {"trails": 3}})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"radio": {"bands": [{"carrier_mhz": 700, "bw": 10}]}})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"geo": {"relocate": {"towers": 2}}})"), InvalidConfig);
    try
    {
        apply(R"({"fading": {"RMa-LoS": {"k": 1}}})");
        FAIL();
    }
    catch (const InvalidConfig &e)
    {
        EXPECT_NE(std::string(e.what()).find("config.fading.RMa-LoS"), std::string::npos);
    }
}

TEST(Config, WrongTypesAndValuesRejected)
{
    EXPECT_THROW(apply(R"({"seed": "one"})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"coverage": "all"})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"coverage": {"site_types": ["macro"]}})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"sites": {"legacy": {"scenario": "UMa"}}})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"radio": {"bands": [{"duplex": "half"}]}})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"geo": {"radii_km": {"macro": 3}}})"), InvalidConfig);
    EXPECT_THROW(apply(R"({"coverage": {"polarizations": [3]}})").validate(), InvalidConfig);
    EXPECT_THROW(apply(R"({"coverage": {"trials": 0}})").validate(), InvalidConfig);
    EXPECT_THROW(apply(R"({"coverage": {"carriers_mhz": [2600]}})").validate(), InvalidConfig);
    EXPECT_THROW(apply(R"({"geo": {"relocate": {"n_towers": -1}}})").validate(), InvalidConfig);
}

TEST(Config, PartialDocumentKeepsDefaults)
{
    const auto cfg = apply(R"({"seed": 9, "coverage": {"users": [20]}, "geo": {"radii_km": {"legacy-3G": 2.5}}})");
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.users, std::vector<int>{20});
    EXPECT_EQ(cfg.trials, 100);
    EXPECT_EQ(cfg.radii_km.at(geo::SiteKind::legacy_3g), 2.5);
    EXPECT_EQ(cfg.coverage_queries().size(), 12u);
    EXPECT_EQ(cfg.fading_nlos.n_clusters, RunConfig{}.fading_nlos.n_clusters);
}

TEST(Config, LoadFileLayersOnBase)
{
    RunConfig base;
    base.trials = 7;
    base.seed = 4;
    const auto p = temp_file("layer.json", R"({"seed": 11})");
    const auto cfg = load_config(p, base);
    EXPECT_EQ(cfg.seed, 11u);
    EXPECT_EQ(cfg.trials, 7);
    EXPECT_THROW(load_config("/nonexistent/cfg.json"), IoError);
    EXPECT_THROW(load_config(temp_file("bad.json", "{not json")), InvalidConfig);
}

TEST(Config, EchoRoundTrips)
{
    auto cfg = apply(R"({"seed": 5, "coverage": {"site_types": ["legacy"], "trials": 12},
                         "fading": {"RMa-NLoS": {"xpr_mean_db": 9.5}},
                         "geo": {"radii_km": {"tv-tower": 30}, "relocate": {"radius_km": 12.5}}})");
    cfg.jobs = 3;
    const json echo = config_to_json(cfg);
    EXPECT_FALSE(echo.contains("jobs"));
    RunConfig back;
    apply_config_json(back, echo);
    EXPECT_EQ(config_to_json(back), echo);
    EXPECT_EQ(back.fading_nlos.xpr_mean_db, 9.5);
    EXPECT_EQ(*back.relocate.radius_km, 12.5);
    EXPECT_EQ(back.site_types, std::vector<SiteType>{SiteType::legacy});
    EXPECT_EQ(config_to_json(RunConfig{}).dump(), config_to_json(RunConfig{}).dump());
}

TEST(Radii, OverridesAndCoverageTable)
{
    const auto table = temp_file("table.json", R"({"config": {}, "result": {"rows": [
        {"type": "legacy", "K": 20, "fc_mhz": 700, "dcov_single_km": 4.0, "dcov_dual_km": 4.5},
        {"type": "high-tower", "K": 20, "fc_mhz": 700, "dcov_single_km": 20.0, "dcov_dual_km": 31.0},
        {"type": "high-tower", "K": 50, "fc_mhz": 700, "dcov_single_km": 12.0, "dcov_dual_km": 17.0}]}})");
    RunConfig cfg;
    cfg.radius_source.coverage_json = table.string();
    cfg.radii_km[geo::SiteKind::candidate] = 8.0;
    const auto radii = resolve_radii(cfg);
    EXPECT_EQ(radii.at(geo::SiteKind::legacy_3g), 4.5);
    EXPECT_EQ(radii.at(geo::SiteKind::legacy_4g), 4.5);
    EXPECT_EQ(radii.at(geo::SiteKind::tv_tower), 31.0);
    EXPECT_EQ(radii.at(geo::SiteKind::candidate), 8.0);

    cfg.radius_source.polarizations = 1;
    cfg.radius_source.users = 50;
    const auto r50 = resolve_radii(cfg);
    EXPECT_EQ(r50.at(geo::SiteKind::tv_tower), 12.0);
    EXPECT_EQ(r50.count(geo::SiteKind::legacy_3g), 0u);

    std::vector<geo::TowerSite> sites{{"a", {0, 0}, geo::SiteKind::legacy_3g, 30, {}}};
    EXPECT_THROW(assign_radii(sites, r50), InvalidConfig);
    assign_radii(sites, radii);
    EXPECT_EQ(*sites[0].coverage_radius_km, 4.5);

    cfg.radius_source.coverage_json = "/nonexistent/table.json";
    EXPECT_THROW(resolve_radii(cfg), IoError);
}
