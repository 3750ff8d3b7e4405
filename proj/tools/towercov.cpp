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


// Command-line front end. Precedence for every setting: flags > config file > defaults.

#include "towercov/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace towercov;

namespace
{

int exit_code(ErrorClass c) { return c == ErrorClass::numerical ? 2 : 1; }

std::string class_name(ErrorClass c)
{
    switch (c)
    {
    case ErrorClass::input:
        return "input";
    case ErrorClass::numerical:
        return "numerical";
    case ErrorClass::io:
        return "io";
    }
    return "unknown";
}

int report_error(int code, const std::string &cls, const std::string &kind, const std::string &message)
{
    json err = {{"status", "error"}, {"exit_code", code}, {"class", cls}, {"kind", kind}, {"message", message}};
    std::cerr << err.dump() << std::endl;
    return code;
}

struct Flags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;

    // coverage-table
    std::optional<int> trials;
    std::vector<std::string> site_types;
    std::vector<double> carriers;
    std::vector<int> users;
    std::vector<int> polarizations;

    // geo-report / relocate
    std::optional<std::string> raster, towers, coverage_json;
    std::vector<std::string> radii;
    std::optional<int> n_towers;
    std::optional<double> radius;
    std::optional<int> stride;

    // channel-dump
    std::optional<std::string> dump_site;
    std::optional<double> dump_carrier, dump_distance;
    std::optional<int> dump_users, dump_pol;
};

RunConfig resolve(const Flags &f)
{
    RunConfig cfg;
    if (!f.config.empty())
        cfg = load_config(f.config);
    if (f.seed)
        cfg.seed = *f.seed;
    if (f.jobs)
        cfg.jobs = *f.jobs;
    if (f.out_dir)
        cfg.out_dir = *f.out_dir;
    if (f.trials)
        cfg.trials = *f.trials;
    if (!f.site_types.empty())
    {
        cfg.site_types.clear();
        for (const auto &t : f.site_types)
            cfg.site_types.push_back(site_type_from_string(t));
    }
    if (!f.carriers.empty())
        cfg.carriers_mhz = f.carriers;
    if (!f.users.empty())
        cfg.users = f.users;
    if (!f.polarizations.empty())
        cfg.polarizations = f.polarizations;
    if (f.raster)
        cfg.raster = *f.raster;
    if (f.towers)
        cfg.towers = *f.towers;
    if (f.coverage_json)
        cfg.radius_source.coverage_json = *f.coverage_json;
    for (const auto &r : f.radii)
    {
        const auto eq = r.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("--radius-for expects KIND=KM, got '" + r + "'");
        double km = 0.0;
        try
        {
            km = std::stod(r.substr(eq + 1));
        }
        catch (const std::exception &)
        {
            throw InvalidConfig("--radius-for: bad number in '" + r + "'");
        }
        cfg.radii_km[geo::site_kind_from_string(r.substr(0, eq))] = km;
    }
    if (f.n_towers)
        cfg.relocate.n_towers = *f.n_towers;
    if (f.radius)
        cfg.relocate.radius_km = *f.radius;
    if (f.stride)
        cfg.relocate.candidate_stride = *f.stride;
    if (f.dump_site)
        cfg.channel_dump.site_type = site_type_from_string(*f.dump_site);
    if (f.dump_carrier)
        cfg.channel_dump.carrier_mhz = *f.dump_carrier;
    if (f.dump_distance)
        cfg.channel_dump.distance_km = *f.dump_distance;
    if (f.dump_users)
        cfg.channel_dump.users = *f.dump_users;
    if (f.dump_pol)
        cfg.channel_dump.polarizations = *f.dump_pol;
    return cfg;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"towercov: massive-MIMO coverage tables and population coverage analysis"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", f.seed, "master seed for all randomness");
    app.add_option("--jobs", f.jobs, "worker threads (results do not depend on it)");
    app.add_option("--out-dir", f.out_dir, "directory for output artifacts");

    auto *cov = app.add_subcommand("coverage-table", "coverage distance for every site/band/user-load configuration");
    cov->add_option("--trials", f.trials, "drops per evaluated distance");
    cov->add_option("--site-types", f.site_types, "subset of legacy, high-tower");
    cov->add_option("--carriers", f.carriers, "carrier frequencies in MHz");
    cov->add_option("--users", f.users, "user loads K");
    cov->add_option("--polarizations", f.polarizations, "1 and/or 2");

    auto *georep = app.add_subcommand("geo-report", "covered population for legacy and tower sites");
    auto *reloc = app.add_subcommand("relocate", "greedy placement of towers on a population raster");
    for (auto *sub : {georep, reloc})
    {
        sub->add_option("--raster", f.raster, "population raster (.csv or .asc)");
        sub->add_option("--towers", f.towers, "towers CSV id,lat,lon,kind,height_m");
        sub->add_option("--coverage-json", f.coverage_json, "coverage-table JSON supplying radii");
        sub->add_option("--radius-for", f.radii, "explicit radius, KIND=KM (repeatable)");
    }
    reloc->add_option("-n,--n-towers", f.n_towers, "towers to place");
    reloc->add_option("--radius", f.radius, "coverage radius of placed towers in km");
    reloc->add_option("--stride", f.stride, "candidate grid stride in cells");

    auto *dump = app.add_subcommand("channel-dump", "write one channel matrix as CSV");
    dump->add_option("--site-type", f.dump_site, "legacy or high-tower");
    dump->add_option("--carrier", f.dump_carrier, "carrier frequency in MHz");
    dump->add_option("--users", f.dump_users, "number of users");
    dump->add_option("--polarizations", f.dump_pol, "1 or 2");
    dump->add_option("--distance", f.dump_distance, "user distance in km");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return report_error(1, "input", "usage", e.what());
    }

    try
    {
        const RunConfig cfg = resolve(f);
        CommandOutput out;
        if (*cov)
            out = cmd_coverage_table(cfg);
        else if (*georep)
            out = cmd_geo_report(cfg);
        else if (*reloc)
            out = cmd_relocate(cfg);
        else
            out = cmd_channel_dump(cfg);
        for (const auto &w : out.warnings)
            std::cerr << "warning: " << w << '\n';
        for (const auto &n : out.notices)
            std::cerr << "notice: " << n << '\n';
        for (const auto &p : out.files)
            std::cout << p.string() << '\n';
        return 0;
    }
    catch (const Error &e)
    {
        return report_error(exit_code(e.error_class()), class_name(e.error_class()), e.kind(), e.what());
    }
    catch (const json::exception &e)
    {
        return report_error(1, "input", "invalid-config", e.what());
    }
    catch (const std::exception &e)
    {
        return report_error(2, "numerical", "internal", e.what());
    }
}
