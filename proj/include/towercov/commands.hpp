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


#ifndef TOWERCOV_COMMANDS_HPP
#define TOWERCOV_COMMANDS_HPP

#include "channel.hpp"
#include "config.hpp"
#include "coverage.hpp"
#include "geo.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace towercov
{

// Files written by a command plus anything worth telling the user.
struct CommandOutput
{
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
    std::vector<std::string> notices;
};

inline std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

// Shortest representation that round-trips, e.g. 700 or 0.75.
inline std::string number(double v) { return json(v).dump(); }

namespace detail
{
inline std::filesystem::path write_artifact(const RunConfig &cfg, const std::string &name, const std::string &content)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
    const auto path = std::filesystem::path(cfg.out_dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << content;
    f.close();
    if (!f)
        throw IoError("failed writing " + path.string());
    return path;
}

inline std::string config_comment(const RunConfig &cfg) { return "# config " + config_to_json(cfg).dump() + "\n"; }

inline std::string with_config(const RunConfig &cfg, json result, const std::vector<std::string> &warnings = {},
                               const std::vector<std::string> &notices = {})
{
    json doc;
    doc["config"] = config_to_json(cfg);
    if (!warnings.empty())
        doc["warnings"] = warnings;
    if (!notices.empty())
        doc["notices"] = notices;
    doc["result"] = std::move(result);
    return doc.dump(2) + "\n";
}

inline std::vector<geo::TowerSite> load_sites(const RunConfig &cfg, bool required)
{
    if (cfg.towers.empty())
    {
        if (required)
            throw InvalidConfig("no towers file given (--towers or geo.towers)");
        return {};
    }
    return geo::load_towers(cfg.towers);
}

inline geo::PopulationRaster load_raster(const RunConfig &cfg)
{
    if (cfg.raster.empty())
        throw InvalidConfig("no raster file given (--raster or geo.raster)");
    return geo::load_raster(cfg.raster);
}

inline std::string geojson_config_member(const RunConfig &cfg) { return "\"config\":" + config_to_json(cfg).dump(); }
} // namespace detail

// ---------------------------------------------------------------------------------------------

inline std::string coverage_table_csv(const CoverageTable &table)
{
    std::ostringstream os;
    os << "type,K,fc,duplex,B,dcov_single,dcov_dual\n";
    for (const auto &r : table.rows)
        os << to_string(r.type) << ',' << r.users << ',' << number(r.carrier_mhz) << ',' << to_string(r.duplex) << ','
           << number(r.bandwidth_mhz) << ',' << (r.dcov_single_km ? fixed(*r.dcov_single_km, 3) : "") << ','
           << (r.dcov_dual_km ? fixed(*r.dcov_dual_km, 3) : "") << '\n';
    return os.str();
}

inline CommandOutput cmd_coverage_table(const RunConfig &cfg)
{
    cfg.validate();
    const CoverageTable table = coverage_table(cfg.coverage_queries());
    CommandOutput out;
    for (const auto &row : table.rows)
        if (!row.error.empty())
            throw NumericalError("coverage run failed for " + to_string(row.type) + " K=" + std::to_string(row.users) +
                                 " fc=" + number(row.carrier_mhz) + " MHz: " + row.error);
    for (const auto &run : table.runs)
        if (run.result && !run.result->diagnostic.empty())
            out.warnings.push_back(to_string(run.query.type) + " K=" + std::to_string(run.query.users) +
                                   " fc=" + number(run.query.radio.carrier_frequency_hz / 1e6) + " MHz pol=" +
                                   std::to_string(run.query.site.array.polarizations) + ": " + run.result->diagnostic);
    out.files.push_back(
        detail::write_artifact(cfg, "coverage_table.csv", detail::config_comment(cfg) + coverage_table_csv(table)));
    out.files.push_back(detail::write_artifact(cfg, "coverage_table.json",
                                               detail::with_config(cfg, coverage_table_to_json(table), out.warnings)));
    return out;
}

// ---------------------------------------------------------------------------------------------

inline std::string scenario_report_csv(const geo::ScenarioReport &rep)
{
    std::ostringstream os;
    os << "class,persons,percent\n";
    const auto line = [&](const char *name, double persons) {
        os << name << ',' << fixed(persons, 3) << ',' << fixed(geo::percent_of(persons, rep.total_population), 6) << '\n';
    };
    line("legacy", rep.counts.legacy);
    line("towers", rep.counts.towers);
    line("combined", rep.counts.combined);
    line("tower-increment", rep.tower_increment);
    line("total", rep.total_population);
    return os.str();
}

inline std::string site_loads_csv(const geo::ScenarioReport &rep, const std::vector<geo::TowerSite> &sites)
{
    std::ostringstream os;
    os << "id,kind,lat,lon,radius_km,persons,active_users_low,active_users_high,active_users_adoption\n";
    for (std::size_t i = 0; i < rep.sites.size(); ++i)
    {
        const auto &l = rep.sites[i];
        os << l.id << ',' << geo::to_string(l.kind) << ',' << fixed(sites[i].position.lat, 6) << ','
           << fixed(sites[i].position.lon, 6) << ',' << fixed(l.radius_km, 3) << ',' << fixed(l.persons, 3) << ','
           << fixed(l.active_users_low, 3) << ',' << fixed(l.active_users_high, 3) << ','
           << fixed(l.active_users_adoption, 3) << '\n';
    }
    return os.str();
}

inline json scenario_report_json(const geo::ScenarioReport &rep)
{
    json sites = json::array();
    for (const auto &l : rep.sites)
        sites.push_back({{"id", l.id},
                         {"kind", geo::to_string(l.kind)},
                         {"radius_km", l.radius_km},
                         {"persons", l.persons},
                         {"active_users_low", l.active_users_low},
                         {"active_users_high", l.active_users_high},
                         {"active_users_adoption", l.active_users_adoption}});
    return {{"total_population", rep.total_population},
            {"covered",
             {{"legacy", rep.counts.legacy},
              {"towers", rep.counts.towers},
              {"combined", rep.counts.combined},
              {"tower_increment", rep.tower_increment}}},
            {"percent",
             {{"legacy", rep.percent_legacy},
              {"towers", rep.percent_towers},
              {"combined", rep.percent_combined},
              {"tower_increment", rep.percent_increment}}},
            {"sites", sites}};
}

inline CommandOutput cmd_geo_report(const RunConfig &cfg)
{
    cfg.validate();
    const auto raster = detail::load_raster(cfg);
    auto sites = detail::load_sites(cfg, true);
    assign_radii(sites, resolve_radii(cfg));

    const auto rep = geo::scenario_report(raster, sites, cfg.scenario);
    CommandOutput out;
    out.warnings = rep.warnings;
    out.files.push_back(detail::write_artifact(cfg, "geo_report.csv",
                                               detail::config_comment(cfg) + scenario_report_csv(rep)));
    out.files.push_back(
        detail::write_artifact(cfg, "geo_sites.csv", detail::config_comment(cfg) + site_loads_csv(rep, sites)));
    out.files.push_back(
        detail::write_artifact(cfg, "geo_report.json", detail::with_config(cfg, scenario_report_json(rep), out.warnings)));
    std::ostringstream gj;
    geo::write_geojson(gj, sites, detail::geojson_config_member(cfg));
    out.files.push_back(detail::write_artifact(cfg, "coverage.geojson", gj.str()));
    return out;
}

// ---------------------------------------------------------------------------------------------

inline CommandOutput cmd_relocate(const RunConfig &cfg)
{
    cfg.validate();
    const auto raster = detail::load_raster(cfg);
    auto existing = detail::load_sites(cfg, false);
    const auto radii = resolve_radii(cfg);
    if (!existing.empty())
        assign_radii(existing, radii);

    double radius = 0.0;
    if (cfg.relocate.radius_km)
        radius = *cfg.relocate.radius_km;
    else if (auto it = radii.find(geo::SiteKind::tv_tower); it != radii.end())
        radius = it->second;
    else
        throw InvalidConfig("no relocation radius (set geo.relocate.radius_km, --radius or a tv-tower radius)");

    CommandOutput out;
    const std::vector<geo::TowerSite> fixed_sites = cfg.relocate.keep_existing ? existing : std::vector<geo::TowerSite>{};
    const auto res = geo::greedy_relocate(raster, cfg.relocate.n_towers, radius,
                                          geo::candidate_grid(raster, static_cast<std::size_t>(cfg.relocate.candidate_stride)),
                                          fixed_sites, cfg.jobs);
    if (cfg.relocate.n_towers == 0)
        out.notices.push_back("n_towers is 0; nothing placed and coverage unchanged");

    std::ostringstream csv;
    csv << detail::config_comment(cfg) << "rank,lat,lon,radius_km,marginal_persons\n";
    json placements = json::array();
    std::vector<geo::TowerSite> placed;
    for (std::size_t i = 0; i < res.placements.size(); ++i)
    {
        const auto &p = res.placements[i];
        csv << i + 1 << ',' << fixed(p.position.lat, 6) << ',' << fixed(p.position.lon, 6) << ',' << fixed(radius, 3)
            << ',' << fixed(p.marginal_persons, 3) << '\n';
        placements.push_back({{"rank", i + 1},
                              {"lat", p.position.lat},
                              {"lon", p.position.lon},
                              {"marginal_persons", p.marginal_persons}});
        placed.push_back({"relocated-" + std::to_string(i + 1), p.position, geo::SiteKind::candidate, 0.0, radius});
    }
    const double total = raster.total_population();
    json result = {{"radius_km", radius},
                   {"total_population", total},
                   {"before_persons", res.baseline_persons},
                   {"after_persons", res.final_persons},
                   {"before_percent", total > 0.0 ? json(geo::percent_of(res.baseline_persons, total)) : json(nullptr)},
                   {"after_percent", total > 0.0 ? json(geo::percent_of(res.final_persons, total)) : json(nullptr)},
                   {"placements", placements}};
    out.files.push_back(detail::write_artifact(cfg, "relocate.csv", csv.str()));
    out.files.push_back(
        detail::write_artifact(cfg, "relocate.json", detail::with_config(cfg, result, out.warnings, out.notices)));
    std::ostringstream gj;
    geo::write_geojson(gj, placed, detail::geojson_config_member(cfg));
    out.files.push_back(detail::write_artifact(cfg, "relocate.geojson", gj.str()));
    return out;
}

// ---------------------------------------------------------------------------------------------

// One drop with users evenly spread in azimuth at a fixed distance.
inline CommandOutput cmd_channel_dump(const RunConfig &cfg)
{
    cfg.validate();
    const auto &d = cfg.channel_dump;
    const CoverageQuery q = cfg.query(d.site_type, d.carrier_mhz, d.users, d.polarizations);
    UserDrop drop;
    drop.rx_height_m = cfg.rx_height_m;
    for (int k = 0; k < d.users; ++k)
    {
        drop.distance_m.push_back(d.distance_km * 1000.0);
        drop.azimuth_deg.push_back(360.0 * k / d.users);
    }
    const ChannelMatrix ch = generate_channel(q.site, q.radio, drop, q.fading, cfg.seed);
    std::ostringstream os;
    os << detail::config_comment(cfg);
    write_channel_csv(os, ch);
    CommandOutput out;
    out.files.push_back(detail::write_artifact(cfg, "channel.csv", os.str()));
    return out;
}

} // namespace towercov

#endif
