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


#ifndef TOWERCOV_CONFIG_HPP
#define TOWERCOV_CONFIG_HPP

#include "coverage.hpp"
#include "errors.hpp"
#include "geo.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace towercov
{

using json = nlohmann::ordered_json;

struct BandConfig
{
    double carrier_mhz = 700.0;
    double bandwidth_mhz = 10.0;
    Duplex duplex = Duplex::fdd;
};

// Which coverage-table entry supplies the radius for each site kind in geo commands.
struct RadiusSource
{
    std::string coverage_json; // output of coverage-table; empty when radii are given directly
    double carrier_mhz = 700.0;
    int users = 20;
    int polarizations = 2;
};

struct RelocateConfig
{
    int n_towers = 3;
    std::optional<double> radius_km; // falls back to the tv-tower radius
    int candidate_stride = 1;
    bool keep_existing = true; // existing towers count as already covering
};

struct ChannelDumpConfig
{
    SiteType site_type = SiteType::high_tower;
    double carrier_mhz = 700.0;
    int users = 4;
    int polarizations = 1;
    double distance_km = 5.0;
};

// Fully resolved run configuration. Defaults reproduce the standard study setup.
struct RunConfig
{
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1; // never echoed; results do not depend on it

    // coverage sweep
    std::vector<SiteType> site_types{SiteType::legacy, SiteType::high_tower};
    std::vector<double> carriers_mhz{700.0, 1800.0, 3500.0};
    std::vector<int> users{20, 50, 100};
    std::vector<int> polarizations{1, 2};
    int trials = 100;
    double satisfaction_threshold = 0.95;
    double grid_km = 0.1;
    double max_distance_km = 200.0;
    double rx_height_m = 8.0;

    ArrayConfig array;
    SiteConfig legacy_site = SiteConfig::legacy();
    SiteConfig high_tower_site = SiteConfig::high_tower();

    RadioConfig radio; // carrier, bandwidth and duplex come from `bands`
    std::vector<BandConfig> bands{{700.0, 10.0, Duplex::fdd}, {1800.0, 20.0, Duplex::fdd}, {3500.0, 100.0, Duplex::tdd}};
    FadingParams fading_los = FadingParams::for_scenario(Scenario::rma_los);
    FadingParams fading_nlos = FadingParams::for_scenario(Scenario::rma_nlos);

    // geo
    std::string raster;
    std::string towers;
    std::map<geo::SiteKind, double> radii_km;
    RadiusSource radius_source;
    geo::ScenarioParams scenario;
    RelocateConfig relocate;

    ChannelDumpConfig channel_dump;

    const BandConfig &band(double carrier_mhz) const
    {
        for (const auto &b : bands)
            if (b.carrier_mhz == carrier_mhz)
                return b;
        throw InvalidConfig("no band configured for " + std::to_string(carrier_mhz) + " MHz");
    }

    const SiteConfig &site(SiteType t) const { return t == SiteType::legacy ? legacy_site : high_tower_site; }

    CoverageQuery query(SiteType type, double carrier_mhz, int k, int pol) const
    {
        CoverageQuery q;
        q.type = type;
        q.site = site(type);
        q.site.array = array;
        q.site.array.polarizations = pol;
        q.fading = q.site.scenario == Scenario::rma_los ? fading_los : fading_nlos;
        const auto &b = band(carrier_mhz);
        q.radio = radio;
        q.radio.carrier_frequency_hz = b.carrier_mhz * 1e6;
        q.radio.bandwidth_hz = b.bandwidth_mhz * 1e6;
        q.radio.duplex = b.duplex;
        q.users = k;
        q.trials = trials;
        q.satisfaction_threshold = satisfaction_threshold;
        q.grid_km = grid_km;
        q.max_distance_km = max_distance_km;
        q.rx_height_m = rx_height_m;
        q.master_seed = seed;
        q.jobs = jobs;
        return q;
    }

    // Sweep order: site type, carrier, users, polarization.
    std::vector<CoverageQuery> coverage_queries() const
    {
        std::vector<CoverageQuery> qs;
        for (auto t : site_types)
            for (double f : carriers_mhz)
                for (int k : users)
                    for (int pol : polarizations)
                        qs.push_back(query(t, f, k, pol));
        return qs;
    }

    void validate() const
    {
        if (jobs < 1)
            throw InvalidConfig("jobs must be at least 1");
        if (site_types.empty() || carriers_mhz.empty() || users.empty() || polarizations.empty())
            throw InvalidConfig("coverage sweep lists must not be empty");
        for (int p : polarizations)
            if (p != 1 && p != 2)
                throw InvalidConfig("polarizations must be 1 or 2");
        for (const auto &q : coverage_queries())
            q.validate();
        for (const auto &[kind, r] : radii_km)
            if (!(r >= 0.0) || !std::isfinite(r))
                throw InvalidConfig("radius for " + geo::to_string(kind) + " must be non-negative");
        scenario.validate();
        if (relocate.n_towers < 0)
            throw InvalidConfig("relocate.n_towers must be non-negative");
        if (relocate.candidate_stride < 1)
            throw InvalidConfig("relocate.candidate_stride must be at least 1");
        if (relocate.radius_km && !(*relocate.radius_km > 0.0))
            throw InvalidConfig("relocate.radius_km must be positive");
        if (channel_dump.users < 1 || !(channel_dump.distance_km * 1000.0 >= min_drop_distance_m))
            throw InvalidConfig("channel_dump needs at least one user beyond the minimum distance");
        band(channel_dump.carrier_mhz);
    }
};

// ---------------------------------------------------------------------------------------------
// JSON mapping

namespace detail
{
// Reads keys from one JSON object and rejects any key that was not consumed.
class StrictObject
{
  public:
    StrictObject(const json &j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw InvalidConfig(where() + ": expected an object");
    }

    template <class T> void get(const char *key, T &out)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end())
            return;
        try
        {
            out = it->template get<T>();
        }
        catch (const json::exception &)
        {
            throw InvalidConfig(where() + "." + key + ": wrong type");
        }
    }

    template <class Fn> void object(const char *key, Fn &&fn)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it != j_.end())
        {
            StrictObject sub(*it, path_ + "." + key);
            fn(sub);
            sub.finish();
        }
    }

    const json *raw(const char *key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw InvalidConfig(where() + ": unknown key '" + it.key() + "'");
    }

    std::string where() const { return path_.empty() ? "config" : "config" + path_; }

  private:
    const json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline Scenario scenario_from_string(const std::string &s)
{
    if (s == "RMa-LoS")
        return Scenario::rma_los;
    if (s == "RMa-NLoS")
        return Scenario::rma_nlos;
    throw InvalidConfig("unknown scenario '" + s + "' (expected RMa-LoS or RMa-NLoS)");
}

inline Duplex duplex_from_string(const std::string &s)
{
    if (s == "FDD")
        return Duplex::fdd;
    if (s == "TDD")
        return Duplex::tdd;
    throw InvalidConfig("unknown duplex mode '" + s + "' (expected FDD or TDD)");
}

inline void read_site(StrictObject &o, SiteConfig &s)
{
    std::string scen = to_string(s.scenario);
    o.get("tx_height_m", s.tx_height_m);
    o.get("tx_power_w", s.tx_power_w);
    o.get("scenario", scen);
    s.scenario = scenario_from_string(scen);
}

inline json write_site(const SiteConfig &s)
{
    return {{"tx_height_m", s.tx_height_m}, {"tx_power_w", s.tx_power_w}, {"scenario", to_string(s.scenario)}};
}

inline void read_fading(StrictObject &o, FadingParams &f)
{
    o.get("rician_k_mean_db", f.rician_k_mean_db);
    o.get("rician_k_std_db", f.rician_k_std_db);
    o.get("n_clusters", f.n_clusters);
    o.get("azimuth_spread_deg", f.azimuth_spread_deg);
    o.get("zenith_spread_deg", f.zenith_spread_deg);
    o.get("xpr_mean_db", f.xpr_mean_db);
    o.get("shadow_sigma_los_db", f.shadow_sigma_los_db);
    o.get("shadow_sigma_los_far_db", f.shadow_sigma_los_far_db);
    o.get("shadow_sigma_nlos_db", f.shadow_sigma_nlos_db);
}

inline json write_fading(const FadingParams &f)
{
    return {{"rician_k_mean_db", f.rician_k_mean_db},
            {"rician_k_std_db", f.rician_k_std_db},
            {"n_clusters", f.n_clusters},
            {"azimuth_spread_deg", f.azimuth_spread_deg},
            {"zenith_spread_deg", f.zenith_spread_deg},
            {"xpr_mean_db", f.xpr_mean_db},
            {"shadow_sigma_los_db", f.shadow_sigma_los_db},
            {"shadow_sigma_los_far_db", f.shadow_sigma_los_far_db},
            {"shadow_sigma_nlos_db", f.shadow_sigma_nlos_db}};
}
} // namespace detail

// Applies a JSON document on top of `cfg`; keys not present keep their current value.
inline void apply_config_json(RunConfig &cfg, const json &doc)
{
    detail::StrictObject root(doc, "");
    root.get("seed", cfg.seed);
    root.get("out_dir", cfg.out_dir);
    root.get("jobs", cfg.jobs);

    root.object("coverage", [&](detail::StrictObject &o) {
        std::vector<std::string> types;
        for (auto t : cfg.site_types)
            types.push_back(to_string(t));
        o.get("site_types", types);
        cfg.site_types.clear();
        for (const auto &t : types)
        {
            try
            {
                cfg.site_types.push_back(site_type_from_string(t));
            }
            catch (const Error &)
            {
                throw InvalidConfig("config.coverage.site_types: unknown site type '" + t + "'");
            }
        }
        o.get("carriers_mhz", cfg.carriers_mhz);
        o.get("users", cfg.users);
        o.get("polarizations", cfg.polarizations);
        o.get("trials", cfg.trials);
        o.get("satisfaction_threshold", cfg.satisfaction_threshold);
        o.get("grid_km", cfg.grid_km);
        o.get("max_distance_km", cfg.max_distance_km);
        o.get("rx_height_m", cfg.rx_height_m);
    });

    root.object("array", [&](detail::StrictObject &o) {
        o.get("m_h", cfg.array.m_h);
        o.get("m_v", cfg.array.m_v);
        o.get("spacing_wavelengths", cfg.array.spacing);
    });

    root.object("sites", [&](detail::StrictObject &o) {
        o.object("legacy", [&](detail::StrictObject &s) { detail::read_site(s, cfg.legacy_site); });
        o.object("high-tower", [&](detail::StrictObject &s) { detail::read_site(s, cfg.high_tower_site); });
    });

    root.object("radio", [&](detail::StrictObject &o) {
        o.get("noise_figure_db", cfg.radio.noise_figure_db);
        o.get("cp_overhead", cfg.radio.cp_overhead);
        o.get("tdd_downlink_fraction", cfg.radio.tdd_downlink_fraction);
        o.get("target_rate_bps", cfg.radio.target_rate_bps);
        if (const json *bands = o.raw("bands"))
        {
            if (!bands->is_array())
                throw InvalidConfig("config.radio.bands: expected an array");
            cfg.bands.clear();
            for (std::size_t i = 0; i < bands->size(); ++i)
            {
                detail::StrictObject b((*bands)[i], ".radio.bands[" + std::to_string(i) + "]");
                BandConfig band;
                std::string duplex = "FDD";
                b.get("carrier_mhz", band.carrier_mhz);
                b.get("bandwidth_mhz", band.bandwidth_mhz);
                b.get("duplex", duplex);
                b.finish();
                band.duplex = detail::duplex_from_string(duplex);
                cfg.bands.push_back(band);
            }
        }
    });

    root.object("fading", [&](detail::StrictObject &o) {
        o.object("RMa-LoS", [&](detail::StrictObject &f) { detail::read_fading(f, cfg.fading_los); });
        o.object("RMa-NLoS", [&](detail::StrictObject &f) { detail::read_fading(f, cfg.fading_nlos); });
    });

    root.object("geo", [&](detail::StrictObject &o) {
        o.get("raster", cfg.raster);
        o.get("towers", cfg.towers);
        if (const json *radii = o.raw("radii_km"))
        {
            if (!radii->is_object())
                throw InvalidConfig("config.geo.radii_km: expected an object");
            for (auto it = radii->begin(); it != radii->end(); ++it)
            {
                geo::SiteKind kind{};
                try
                {
                    kind = geo::site_kind_from_string(it.key());
                }
                catch (const Error &)
                {
                    throw InvalidConfig("config.geo.radii_km: unknown site kind '" + it.key() + "'");
                }
                if (!it->is_number())
                    throw InvalidConfig("config.geo.radii_km." + it.key() + ": wrong type");
                cfg.radii_km[kind] = it->get<double>();
            }
        }
        o.object("radius_source", [&](detail::StrictObject &r) {
            r.get("coverage_json", cfg.radius_source.coverage_json);
            r.get("carrier_mhz", cfg.radius_source.carrier_mhz);
            r.get("users", cfg.radius_source.users);
            r.get("polarizations", cfg.radius_source.polarizations);
        });
        o.object("scenario", [&](detail::StrictObject &s) {
            s.get("active_user_fraction_low", cfg.scenario.active_user_fraction_low);
            s.get("active_user_fraction_high", cfg.scenario.active_user_fraction_high);
            s.get("adoption_rate", cfg.scenario.adoption_rate);
            s.get("active_share_of_subscribers", cfg.scenario.active_share_of_subscribers);
        });
        o.object("relocate", [&](detail::StrictObject &r) {
            r.get("n_towers", cfg.relocate.n_towers);
            if (const json *rad = r.raw("radius_km"); rad && !rad->is_null())
            {
                if (!rad->is_number())
                    throw InvalidConfig("config.geo.relocate.radius_km: wrong type");
                cfg.relocate.radius_km = rad->get<double>();
            }
            r.get("candidate_stride", cfg.relocate.candidate_stride);
            r.get("keep_existing", cfg.relocate.keep_existing);
        });
    });

    root.object("channel_dump", [&](detail::StrictObject &o) {
        std::string type = to_string(cfg.channel_dump.site_type);
        o.get("site_type", type);
        try
        {
            cfg.channel_dump.site_type = site_type_from_string(type);
        }
        catch (const Error &)
        {
            throw InvalidConfig("config.channel_dump.site_type: unknown site type '" + type + "'");
        }
        o.get("carrier_mhz", cfg.channel_dump.carrier_mhz);
        o.get("users", cfg.channel_dump.users);
        o.get("polarizations", cfg.channel_dump.polarizations);
        o.get("distance_km", cfg.channel_dump.distance_km);
    });
    root.finish();
}

inline RunConfig load_config(const std::filesystem::path &path, RunConfig base = {})
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open config file " + path.string());
    json doc;
    try
    {
        doc = json::parse(f);
    }
    catch (const json::parse_error &e)
    {
        throw InvalidConfig("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    apply_config_json(base, doc);
    return base;
}

// The resolved configuration, in the same layout the loader accepts. `jobs` and `out_dir` are
// omitted so that artifacts do not depend on the worker count or where they were written.
inline json config_to_json(const RunConfig &cfg)
{
    json types = json::array();
    for (auto t : cfg.site_types)
        types.push_back(to_string(t));
    json bands = json::array();
    for (const auto &b : cfg.bands)
        bands.push_back({{"carrier_mhz", b.carrier_mhz}, {"bandwidth_mhz", b.bandwidth_mhz}, {"duplex", to_string(b.duplex)}});
    json radii = json::object();
    for (const auto &[kind, r] : cfg.radii_km)
        radii[geo::to_string(kind)] = r;

    json j;
    j["seed"] = cfg.seed;
    j["coverage"] = {{"site_types", types},
                     {"carriers_mhz", cfg.carriers_mhz},
                     {"users", cfg.users},
                     {"polarizations", cfg.polarizations},
                     {"trials", cfg.trials},
                     {"satisfaction_threshold", cfg.satisfaction_threshold},
                     {"grid_km", cfg.grid_km},
                     {"max_distance_km", cfg.max_distance_km},
                     {"rx_height_m", cfg.rx_height_m}};
    j["array"] = {{"m_h", cfg.array.m_h}, {"m_v", cfg.array.m_v}, {"spacing_wavelengths", cfg.array.spacing}};
    j["sites"] = {{"legacy", detail::write_site(cfg.legacy_site)}, {"high-tower", detail::write_site(cfg.high_tower_site)}};
    j["radio"] = {{"noise_figure_db", cfg.radio.noise_figure_db},
                  {"cp_overhead", cfg.radio.cp_overhead},
                  {"tdd_downlink_fraction", cfg.radio.tdd_downlink_fraction},
                  {"target_rate_bps", cfg.radio.target_rate_bps},
                  {"bands", bands}};
    j["fading"] = {{"RMa-LoS", detail::write_fading(cfg.fading_los)}, {"RMa-NLoS", detail::write_fading(cfg.fading_nlos)}};
    j["geo"] = {{"raster", cfg.raster},
                {"towers", cfg.towers},
                {"radii_km", radii},
                {"radius_source",
                 {{"coverage_json", cfg.radius_source.coverage_json},
                  {"carrier_mhz", cfg.radius_source.carrier_mhz},
                  {"users", cfg.radius_source.users},
                  {"polarizations", cfg.radius_source.polarizations}}},
                {"scenario",
                 {{"active_user_fraction_low", cfg.scenario.active_user_fraction_low},
                  {"active_user_fraction_high", cfg.scenario.active_user_fraction_high},
                  {"adoption_rate", cfg.scenario.adoption_rate},
                  {"active_share_of_subscribers", cfg.scenario.active_share_of_subscribers}}},
                {"relocate",
                 {{"n_towers", cfg.relocate.n_towers},
                  {"radius_km", cfg.relocate.radius_km ? json(*cfg.relocate.radius_km) : json(nullptr)},
                  {"candidate_stride", cfg.relocate.candidate_stride},
                  {"keep_existing", cfg.relocate.keep_existing}}}};
    j["channel_dump"] = {{"site_type", to_string(cfg.channel_dump.site_type)},
                         {"carrier_mhz", cfg.channel_dump.carrier_mhz},
                         {"users", cfg.channel_dump.users},
                         {"polarizations", cfg.channel_dump.polarizations},
                         {"distance_km", cfg.channel_dump.distance_km}};
    return j;
}

// ---------------------------------------------------------------------------------------------
// Coverage-table JSON and radius assignment

inline json coverage_table_to_json(const CoverageTable &table)
{
    json rows = json::array();
    for (const auto &r : table.rows)
    {
        json row = {{"type", to_string(r.type)},
                    {"K", r.users},
                    {"fc_mhz", r.carrier_mhz},
                    {"duplex", to_string(r.duplex)},
                    {"B_mhz", r.bandwidth_mhz},
                    {"dcov_single_km", r.dcov_single_km ? json(*r.dcov_single_km) : json(nullptr)},
                    {"dcov_dual_km", r.dcov_dual_km ? json(*r.dcov_dual_km) : json(nullptr)}};
        if (!r.error.empty())
            row["error"] = r.error;
        rows.push_back(row);
    }
    json runs = json::array();
    for (const auto &run : table.runs)
    {
        const auto &q = run.query;
        json entry = {{"type", to_string(q.type)},
                      {"K", q.users},
                      {"fc_mhz", q.radio.carrier_frequency_hz / 1e6},
                      {"polarizations", q.site.array.polarizations}};
        if (run.result)
        {
            entry["dcov_km"] = run.result->d_cov_km;
            if (!run.result->diagnostic.empty())
                entry["diagnostic"] = run.result->diagnostic;
            json curve = json::array();
            for (const auto &ev : run.result->curve)
                curve.push_back({{"distance_km", ev.distance_km},
                                 {"satisfied", ev.satisfied},
                                 {"total", ev.total},
                                 {"failed_drops", ev.failed_drops},
                                 {"fraction", ev.fraction},
                                 {"ci95_half_width", ev.half_width}});
            entry["curve"] = curve;
        }
        else
            entry["error"] = run.error;
        runs.push_back(entry);
    }
    return {{"rows", rows}, {"runs", runs}};
}

// Radius per site kind: explicit overrides first, then the matching coverage-table entry
// (legacy kinds from the legacy row, tv-tower and candidate from the high-tower row).
inline std::map<geo::SiteKind, double> resolve_radii(const RunConfig &cfg)
{
    std::map<geo::SiteKind, double> radii = cfg.radii_km;
    const auto &src = cfg.radius_source;
    if (src.coverage_json.empty())
        return radii;

    std::ifstream f(src.coverage_json);
    if (!f)
        throw IoError("cannot open coverage table " + src.coverage_json);
    json doc;
    try
    {
        doc = json::parse(f);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError("coverage table " + src.coverage_json + " is not valid JSON: " + e.what());
    }
    if (doc.contains("result"))
        doc = doc["result"];
    const auto lookup = [&](SiteType t) -> std::optional<double> {
        if (!doc.contains("rows") || !doc["rows"].is_array())
            throw ParseError("coverage table " + src.coverage_json + " has no rows");
        const char *col = src.polarizations == 2 ? "dcov_dual_km" : "dcov_single_km";
        for (const auto &row : doc["rows"])
            if (row.value("type", "") == to_string(t) && row.value("K", 0) == src.users &&
                row.value("fc_mhz", 0.0) == src.carrier_mhz && row.contains(col) && row[col].is_number())
                return row[col].get<double>();
        return std::nullopt;
    };
    const auto legacy = lookup(SiteType::legacy);
    const auto high = lookup(SiteType::high_tower);
    for (auto kind : {geo::SiteKind::legacy_3g, geo::SiteKind::legacy_4g, geo::SiteKind::tv_tower, geo::SiteKind::candidate})
    {
        if (radii.count(kind))
            continue;
        const auto &r = geo::is_legacy(kind) ? legacy : high;
        if (r)
            radii[kind] = *r;
    }
    return radii;
}

// Fills in every site's radius; a kind without any radius is a configuration error.
inline void assign_radii(std::vector<geo::TowerSite> &sites, const std::map<geo::SiteKind, double> &radii)
{
    for (auto &s : sites)
    {
        auto it = radii.find(s.kind);
        if (it == radii.end())
            throw InvalidConfig("no coverage radius for site kind " + geo::to_string(s.kind) +
                                " (set geo.radii_km or geo.radius_source.coverage_json)");
        s.coverage_radius_km = it->second;
    }
}

} // namespace towercov

#endif
