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


#ifndef TOWERCOV_GEO_HPP
#define TOWERCOV_GEO_HPP

#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace towercov::geo
{

inline constexpr double earth_radius_km = 6371.0;
inline constexpr double km_per_degree = 111.195; // 2 pi R / 360

struct LatLon
{
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const LatLon &, const LatLon &) = default;
    friend auto operator<=>(const LatLon &, const LatLon &) = default;
};

inline double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Great-circle distance in km on a sphere of radius 6371 km.
inline double haversine(const LatLon &a, const LatLon &b)
{
    const double dlat = to_rad(b.lat - a.lat);
    const double dlon = to_rad(b.lon - a.lon);
    const double s = std::sin(dlat / 2.0) * std::sin(dlat / 2.0) +
                     std::cos(to_rad(a.lat)) * std::cos(to_rad(b.lat)) * std::sin(dlon / 2.0) * std::sin(dlon / 2.0);
    return 2.0 * earth_radius_km * std::asin(std::min(1.0, std::sqrt(s)));
}

// Point reached from `origin` after travelling `distance_km` along initial bearing `bearing_deg`.
inline LatLon destination(const LatLon &origin, double bearing_deg, double distance_km)
{
    const double delta = distance_km / earth_radius_km;
    const double theta = to_rad(bearing_deg);
    const double phi1 = to_rad(origin.lat);
    const double lambda1 = to_rad(origin.lon);
    const double phi2 = std::asin(std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta));
    const double lambda2 = lambda1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                                std::cos(delta) - std::sin(phi1) * std::sin(phi2));
    double lon = to_deg(lambda2);
    lon = std::fmod(lon + 540.0, 360.0) - 180.0;
    return {to_deg(phi2), lon};
}

// Regular lat/lon grid of population density (persons per km^2). Row 0 is the southernmost
// row; cell (r, c) is centred at (lat_min + (r + 0.5) dlat, lon_min + (c + 0.5) dlon).
class PopulationRaster
{
  public:
    PopulationRaster() = default;

    PopulationRaster(std::size_t rows, std::size_t cols, double lat_min, double lon_min, double dlat, double dlon,
                     std::vector<double> density)
        : rows_(rows), cols_(cols), lat_min_(lat_min), lon_min_(lon_min), dlat_(dlat), dlon_(dlon),
          density_(std::move(density))
    {
        if (rows_ == 0 || cols_ == 0)
            throw InvalidArgument("raster: empty grid");
        if (!(dlat_ > 0.0) || !(dlon_ > 0.0))
            throw InvalidArgument("raster: cell size must be positive");
        if (density_.size() != rows_ * cols_)
            throw InvalidArgument("raster: density count does not match grid size");
        for (double d : density_)
            if (!(d >= 0.0) || !std::isfinite(d))
                throw InvalidArgument("raster: densities must be finite and non-negative");
        area_.resize(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
        {
            area_[r] = (km_per_degree * dlat_) * (km_per_degree * dlon_ * std::cos(to_rad(center_lat(r))));
            if (!(area_[r] > 0.0))
                throw InvalidArgument("raster: cell area must be positive (grid reaches a pole)");
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double lat_min() const { return lat_min_; }
    double lon_min() const { return lon_min_; }
    double lat_max() const { return lat_min_ + static_cast<double>(rows_) * dlat_; }
    double lon_max() const { return lon_min_ + static_cast<double>(cols_) * dlon_; }
    double dlat() const { return dlat_; }
    double dlon() const { return dlon_; }

    double center_lat(std::size_t r) const { return lat_min_ + (static_cast<double>(r) + 0.5) * dlat_; }
    double center_lon(std::size_t c) const { return lon_min_ + (static_cast<double>(c) + 0.5) * dlon_; }
    LatLon center(std::size_t r, std::size_t c) const { return {center_lat(r), center_lon(c)}; }

    double density(std::size_t r, std::size_t c) const { return density_[r * cols_ + c]; }
    const std::vector<double> &densities() const { return density_; }

    // km^2, latitude-corrected
    double cell_area(std::size_t r) const { return area_[r]; }
    double persons(std::size_t r, std::size_t c) const { return density(r, c) * area_[r]; }

    double total_population() const
    {
        double total = 0.0;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                total += persons(r, c);
        return total;
    }

    bool contains(const LatLon &p) const
    {
        return p.lat >= lat_min_ && p.lat <= lat_max() && p.lon >= lon_min_ && p.lon <= lon_max();
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    double lat_min_ = 0.0, lon_min_ = 0.0, dlat_ = 0.0, dlon_ = 0.0;
    std::vector<double> density_;
    std::vector<double> area_;
};

// ---------------------------------------------------------------------------------------------
// Raster I/O

namespace detail
{
inline std::string trim(std::string s)
{
    const auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

inline std::vector<std::string> split(const std::string &line, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

inline double parse_double(const std::string &s, const std::string &where)
{
    try
    {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw ParseError(where + ": trailing characters in number '" + s + "'");
        return v;
    }
    catch (const std::invalid_argument &)
    {
        throw ParseError(where + ": not a number '" + s + "'");
    }
    catch (const std::out_of_range &)
    {
        throw ParseError(where + ": number out of range '" + s + "'");
    }
}

inline std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return s;
}

// Sorted unique axis values, merging values closer than `tol`.
inline std::vector<double> unique_axis(std::vector<double> v, double tol)
{
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x - out.back() > tol)
            out.push_back(x);
    return out;
}

inline std::size_t axis_index(const std::vector<double> &axis, double v, double tol)
{
    auto it = std::lower_bound(axis.begin(), axis.end(), v - tol);
    if (it == axis.end() || std::abs(*it - v) > tol)
        throw ParseError("raster: coordinate not on the grid");
    return static_cast<std::size_t>(it - axis.begin());
}

inline double regular_step(const std::vector<double> &axis, const std::string &name)
{
    const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (std::abs((axis[i] - axis[i - 1]) - step) > 1e-6 * std::max(1.0, step) + 1e-9)
            throw ParseError("raster: irregular " + name + " spacing; grid must be rectilinear and evenly spaced");
    return step;
}
} // namespace detail

// CSV of cell centres: optional "# cellsize_deg=<dlat>[,<dlon>]" comment, optional
// "lat,lon,density" header, then one row per cell. Every cell of the grid must be present
// exactly once. The cell-size comment is required when an axis has a single value.
inline PopulationRaster read_raster_csv(std::istream &is)
{
    std::vector<double> lats, lons, dens;
    std::optional<double> cs_lat, cs_lon;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        line = detail::trim(line);
        if (line.empty())
            continue;
        const std::string where = "raster csv line " + std::to_string(lineno);
        if (line[0] == '#')
        {
            const auto eq = line.find("cellsize_deg=");
            if (eq != std::string::npos)
            {
                const auto parts = detail::split(line.substr(eq + 13), ',');
                cs_lat = detail::parse_double(parts.at(0), where);
                cs_lon = parts.size() > 1 ? detail::parse_double(parts[1], where) : *cs_lat;
            }
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 3)
            throw ParseError(where + ": expected 3 fields lat,lon,density");
        if (detail::lower(f[0]) == "lat")
            continue;
        const double lat = detail::parse_double(f[0], where);
        const double lon = detail::parse_double(f[1], where);
        const double d = detail::parse_double(f[2], where);
        if (!(d >= 0.0) || !std::isfinite(d))
            throw ParseError(where + ": negative or non-finite density");
        if (std::abs(lat) > 90.0 || std::abs(lon) > 360.0)
            throw ParseError(where + ": coordinate out of range");
        lats.push_back(lat);
        lons.push_back(lon);
        dens.push_back(d);
    }
    if (dens.empty())
        throw ParseError("raster csv: no data rows");

    const double tol = 1e-7;
    const auto lat_axis = detail::unique_axis(lats, tol);
    const auto lon_axis = detail::unique_axis(lons, tol);
    double dlat = 0.0, dlon = 0.0;
    if (lat_axis.size() > 1)
        dlat = detail::regular_step(lat_axis, "latitude");
    else if (cs_lat)
        dlat = *cs_lat;
    else
        throw ParseError("raster csv: single latitude row needs a '# cellsize_deg=' comment");
    if (lon_axis.size() > 1)
        dlon = detail::regular_step(lon_axis, "longitude");
    else if (cs_lon)
        dlon = *cs_lon;
    else
        throw ParseError("raster csv: single longitude column needs a '# cellsize_deg=' comment");

    const std::size_t rows = lat_axis.size(), cols = lon_axis.size();
    if (dens.size() != rows * cols)
        throw ParseError("raster csv: grid is not rectilinear (" + std::to_string(dens.size()) + " cells for " +
                         std::to_string(rows) + "x" + std::to_string(cols) + ")");
    std::vector<double> grid(rows * cols, -1.0);
    for (std::size_t i = 0; i < dens.size(); ++i)
    {
        const std::size_t r = detail::axis_index(lat_axis, lats[i], tol);
        const std::size_t c = detail::axis_index(lon_axis, lons[i], tol);
        if (grid[r * cols + c] >= 0.0)
            throw ParseError("raster csv: duplicate cell at " + std::to_string(lats[i]) + "," + std::to_string(lons[i]));
        grid[r * cols + c] = dens[i];
    }
    return {rows, cols, lat_axis.front() - dlat / 2.0, lon_axis.front() - dlon / 2.0, dlat, dlon, std::move(grid)};
}

// ESRI ASCII grid. Rows run north to south in the file. NODATA cells count as zero density.
// Non-square cells may be given with "dx"/"dy" in place of "cellsize".
inline PopulationRaster read_raster_asc(std::istream &is)
{
    std::map<std::string, double> header;
    bool corner_x = true, corner_y = true;
    std::string token;
    std::streampos data_start = is.tellg();
    while (is >> token)
    {
        const std::string key = detail::lower(token);
        if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0]))))
        {
            is.clear();
            is.seekg(data_start);
            break;
        }
        std::string value;
        if (!(is >> value))
            throw ParseError("esri grid: header key '" + token + "' without value");
        if (key == "xllcenter")
            corner_x = false;
        if (key == "yllcenter")
            corner_y = false;
        header[key] = detail::parse_double(value, "esri grid header");
        data_start = is.tellg();
    }
    auto need = [&](const std::string &k) {
        auto it = header.find(k);
        if (it == header.end())
            throw ParseError("esri grid: missing header key " + k);
        return it->second;
    };
    const double ncols = need("ncols"), nrows = need("nrows");
    if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
        throw ParseError("esri grid: invalid dimensions");
    double dx = 0.0, dy = 0.0;
    if (header.count("cellsize"))
        dx = dy = header["cellsize"];
    else
    {
        dx = need("dx");
        dy = need("dy");
    }
    const double x0 = corner_x ? need("xllcorner") : need("xllcenter") - dx / 2.0;
    const double y0 = corner_y ? need("yllcorner") : need("yllcenter") - dy / 2.0;
    const std::optional<double> nodata =
        header.count("nodata_value") ? std::optional<double>(header["nodata_value"]) : std::nullopt;

    const auto rows = static_cast<std::size_t>(nrows), cols = static_cast<std::size_t>(ncols);
    std::vector<double> grid(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
    {
        if (!(is >> token))
            throw ParseError("esri grid: expected " + std::to_string(rows * cols) + " values, got " + std::to_string(i));
        double v = detail::parse_double(token, "esri grid data");
        if (nodata && v == *nodata)
            v = 0.0;
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ParseError("esri grid: negative or non-finite density");
        const std::size_t file_row = i / cols, c = i % cols;
        grid[(rows - 1 - file_row) * cols + c] = v;
    }
    if (is >> token)
        throw ParseError("esri grid: more values than nrows*ncols");
    return {rows, cols, y0, x0, dy, dx, std::move(grid)};
}

inline PopulationRaster load_raster(const std::filesystem::path &path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open raster file " + path.string());
    const std::string ext = detail::lower(path.extension().string());
    if (ext == ".asc")
        return read_raster_asc(f);
    if (ext == ".csv")
        return read_raster_csv(f);
    std::string first;
    f >> first;
    f.seekg(0);
    return detail::lower(first) == "ncols" ? read_raster_asc(f) : read_raster_csv(f);
}

inline void write_raster_csv(std::ostream &os, const PopulationRaster &r)
{
    os << std::setprecision(17) << "# cellsize_deg=" << r.dlat() << ',' << r.dlon() << "\nlat,lon,density\n";
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j)
            os << std::fixed << std::setprecision(6) << r.center_lat(i) << ',' << r.center_lon(j) << ','
               << std::defaultfloat << std::setprecision(17) << r.density(i, j) << '\n';
}

inline void write_raster_asc(std::ostream &os, const PopulationRaster &r)
{
    os << std::setprecision(17) << "ncols " << r.cols() << "\nnrows " << r.rows() << "\nxllcorner " << r.lon_min()
       << "\nyllcorner " << r.lat_min() << '\n';
    if (r.dlat() == r.dlon())
        os << "cellsize " << r.dlat() << '\n';
    else
        os << "dx " << r.dlon() << "\ndy " << r.dlat() << '\n';
    for (std::size_t i = r.rows(); i-- > 0;)
    {
        for (std::size_t j = 0; j < r.cols(); ++j)
            os << (j ? " " : "") << r.density(i, j);
        os << '\n';
    }
}

// Smooth synthetic population: a background level plus Gaussian settlements.
struct Settlement
{
    LatLon center;
    double peak_density = 0.0; // persons / km^2
    double sigma_km = 1.0;
};

inline PopulationRaster synthetic_raster(double lat_min, double lon_min, std::size_t rows, std::size_t cols,
                                         double cell_deg, double background, const std::vector<Settlement> &towns)
{
    std::vector<double> d(rows * cols, background);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
        {
            const LatLon p{lat_min + (static_cast<double>(r) + 0.5) * cell_deg,
                           lon_min + (static_cast<double>(c) + 0.5) * cell_deg};
            for (const auto &t : towns)
            {
                const double x = haversine(p, t.center) / t.sigma_km;
                d[r * cols + c] += t.peak_density * std::exp(-0.5 * x * x);
            }
        }
    return {rows, cols, lat_min, lon_min, cell_deg, cell_deg, std::move(d)};
}

// Rural test scene: sparse background with a handful of settlements at random positions.
inline PopulationRaster rural_fixture_raster(std::uint64_t seed, std::size_t rows = 150, std::size_t cols = 100,
                                             double cell_deg = 0.01, LatLon south_west = {10.5, 35.0})
{
    Rng rng(derive_seed(seed, {0x7261}));
    std::vector<Settlement> towns;
    const int n = 6;
    for (int i = 0; i < n; ++i)
    {
        Settlement s;
        s.center = {south_west.lat + uniform(rng, 0.1, 0.9) * static_cast<double>(rows) * cell_deg,
                    south_west.lon + uniform(rng, 0.1, 0.9) * static_cast<double>(cols) * cell_deg};
        s.peak_density = uniform(rng, 40.0, 400.0);
        s.sigma_km = uniform(rng, 1.5, 6.0);
        towns.push_back(s);
    }
    return synthetic_raster(south_west.lat, south_west.lon, rows, cols, cell_deg, 5.0, towns);
}

// ---------------------------------------------------------------------------------------------
// Tower sites

enum class SiteKind
{
    legacy_3g,
    legacy_4g,
    tv_tower,
    candidate
};

inline std::string to_string(SiteKind k)
{
    switch (k)
    {
    case SiteKind::legacy_3g:
        return "legacy-3G";
    case SiteKind::legacy_4g:
        return "legacy-4G";
    case SiteKind::tv_tower:
        return "tv-tower";
    case SiteKind::candidate:
        return "candidate";
    }
    return "?";
}

inline SiteKind site_kind_from_string(const std::string &s)
{
    const std::string k = detail::lower(detail::trim(s));
    if (k == "legacy-3g")
        return SiteKind::legacy_3g;
    if (k == "legacy-4g")
        return SiteKind::legacy_4g;
    if (k == "tv-tower")
        return SiteKind::tv_tower;
    if (k == "candidate")
        return SiteKind::candidate;
    throw ParseError("unknown site kind '" + s + "'");
}

inline bool is_legacy(SiteKind k) { return k == SiteKind::legacy_3g || k == SiteKind::legacy_4g; }

struct TowerSite
{
    std::string id;
    LatLon position;
    SiteKind kind = SiteKind::candidate;
    double height_m = 0.0;
    std::optional<double> coverage_radius_km;
};

// CSV with header id,lat,lon,kind,height_m.
inline std::vector<TowerSite> read_towers_csv(std::istream &is)
{
    std::vector<TowerSite> sites;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        line = detail::trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto f = detail::split(line, ',');
        const std::string where = "towers csv line " + std::to_string(lineno);
        if (f.size() != 5)
            throw ParseError(where + ": expected id,lat,lon,kind,height_m");
        if (detail::lower(f[0]) == "id")
            continue;
        TowerSite s;
        s.id = f[0];
        s.position = {detail::parse_double(f[1], where), detail::parse_double(f[2], where)};
        if (std::abs(s.position.lat) > 90.0 || std::abs(s.position.lon) > 180.0)
            throw ParseError(where + ": coordinate out of range");
        s.kind = site_kind_from_string(f[3]);
        s.height_m = detail::parse_double(f[4], where);
        sites.push_back(std::move(s));
    }
    return sites;
}

inline std::vector<TowerSite> load_towers(const std::filesystem::path &path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open towers file " + path.string());
    return read_towers_csv(f);
}

// ---------------------------------------------------------------------------------------------
// Covered population

struct CoveredPopulation
{
    double persons = 0.0;
    std::size_t cells = 0;
    std::vector<std::string> warnings;
};

namespace detail
{
inline double site_radius(const TowerSite &s)
{
    if (!s.coverage_radius_km)
        throw InvalidConfig("site " + s.id + " has no coverage radius assigned");
    if (!(*s.coverage_radius_km >= 0.0) || !std::isfinite(*s.coverage_radius_km))
        throw InvalidConfig("site " + s.id + " has an invalid coverage radius");
    return *s.coverage_radius_km;
}

// Calls fn(r, c) for every cell whose centre lies within radius_km of `center`. Only a
// conservative bounding window is scanned; membership is decided by the haversine test.
template <class Fn>
void for_each_cell_in_disk(const PopulationRaster &raster, const LatLon &center, double radius_km, Fn &&fn)
{
    const double rho = radius_km / earth_radius_km; // angular radius
    const double dlat_deg = to_deg(rho);
    const double lat_lo = center.lat - dlat_deg - raster.dlat();
    const double lat_hi = center.lat + dlat_deg + raster.dlat();
    const auto row_of = [&](double lat) {
        return std::floor((lat - raster.lat_min()) / raster.dlat());
    };
    const double r_lo = std::max(0.0, row_of(lat_lo));
    const double r_hi = std::min(static_cast<double>(raster.rows()) - 1.0, row_of(lat_hi));
    if (r_lo > r_hi)
        return;

    double dlon_deg = 360.0;
    const double cos_lat = std::cos(to_rad(center.lat));
    if (rho < std::numbers::pi / 2.0 - std::abs(to_rad(center.lat)) - 1e-9 && cos_lat > 0.0)
        dlon_deg = to_deg(std::asin(std::min(1.0, std::sin(rho) / cos_lat)));
    std::size_t c_lo = 0, c_hi = raster.cols() - 1;
    if (dlon_deg < 180.0)
    {
        const double lo = std::floor((center.lon - dlon_deg - raster.dlon() - raster.lon_min()) / raster.dlon());
        const double hi = std::floor((center.lon + dlon_deg + raster.dlon() - raster.lon_min()) / raster.dlon());
        if (hi < 0.0 || lo > static_cast<double>(raster.cols()) - 1.0)
            return;
        c_lo = static_cast<std::size_t>(std::max(0.0, lo));
        c_hi = static_cast<std::size_t>(std::min(static_cast<double>(raster.cols()) - 1.0, hi));
    }
    for (auto r = static_cast<std::size_t>(r_lo); r <= static_cast<std::size_t>(r_hi); ++r)
        for (std::size_t c = c_lo; c <= c_hi; ++c)
            if (haversine(raster.center(r, c), center) <= radius_km)
                fn(r, c);
}
} // namespace detail

// Cells (row-major flags) whose centre lies inside at least one site's disk.
inline std::vector<std::uint8_t> coverage_mask(const PopulationRaster &raster, const std::vector<TowerSite> &sites)
{
    std::vector<std::uint8_t> mask(raster.rows() * raster.cols(), 0);
    for (const auto &s : sites)
        detail::for_each_cell_in_disk(raster, s.position, detail::site_radius(s),
                                      [&](std::size_t r, std::size_t c) { mask[r * raster.cols() + c] = 1; });
    return mask;
}

inline double masked_population(const PopulationRaster &raster, const std::vector<std::uint8_t> &mask)
{
    double total = 0.0;
    for (std::size_t r = 0; r < raster.rows(); ++r)
        for (std::size_t c = 0; c < raster.cols(); ++c)
            if (mask[r * raster.cols() + c])
                total += raster.persons(r, c);
    return total;
}

// Persons in the union of coverage disks, counting each cell once (cell-centre rule).
inline CoveredPopulation covered_population(const PopulationRaster &raster, const std::vector<TowerSite> &sites)
{
    CoveredPopulation out;
    if (sites.empty())
    {
        out.warnings.push_back("no sites given; covered population is 0");
        return out;
    }
    for (const auto &s : sites)
        if (!raster.contains(s.position))
            out.warnings.push_back("site " + s.id + " lies outside the raster bounds");
    const auto mask = coverage_mask(raster, sites);
    out.persons = masked_population(raster, mask);
    out.cells = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
    return out;
}

// ---------------------------------------------------------------------------------------------
// Scenario report

struct ScenarioParams
{
    double active_user_fraction_low = 0.01;
    double active_user_fraction_high = 0.02;
    double adoption_rate = 0.02;
    double active_share_of_subscribers = 1.0 / 20.0;

    void validate() const
    {
        for (double v : {active_user_fraction_low, active_user_fraction_high, adoption_rate, active_share_of_subscribers})
            if (!(v > 0.0 && v <= 1.0))
                throw InvalidConfig("scenario: fractions must lie in (0, 1]");
        if (active_user_fraction_low > active_user_fraction_high)
            throw InvalidConfig("scenario: active user band is inverted");
    }
};

struct CoverageCounts
{
    double legacy = 0.0;   // union of legacy sites
    double towers = 0.0;   // union of tv-tower and candidate sites
    double combined = 0.0; // union of all sites
};

struct SiteLoad
{
    std::string id;
    SiteKind kind = SiteKind::candidate;
    double radius_km = 0.0;
    double persons = 0.0;           // inside this site's disk, overlaps included
    double active_users_low = 0.0;  // persons * low active fraction
    double active_users_high = 0.0;
    double active_users_adoption = 0.0; // persons * adoption rate * active share
};

struct ScenarioReport
{
    double total_population = 0.0;
    CoverageCounts counts;
    double tower_increment = 0.0; // combined - legacy
    double percent_legacy = 0.0;
    double percent_towers = 0.0;
    double percent_combined = 0.0;
    double percent_increment = 0.0;
    ScenarioParams params;
    std::vector<SiteLoad> sites;
    std::vector<std::string> warnings;
};

inline double percent_of(double count, double total) { return 100.0 * count / total; }

// Pure arithmetic on already-computed counts.
inline ScenarioReport build_scenario_report(const CoverageCounts &counts, const ScenarioParams &params,
                                            double total_population)
{
    params.validate();
    if (!(total_population > 0.0) || !std::isfinite(total_population))
        throw InvalidArgument("scenario: total population must be positive; percentages are undefined");
    ScenarioReport rep;
    rep.total_population = total_population;
    rep.counts = counts;
    rep.params = params;
    rep.tower_increment = counts.combined - counts.legacy;
    rep.percent_legacy = percent_of(counts.legacy, total_population);
    rep.percent_towers = percent_of(counts.towers, total_population);
    rep.percent_combined = percent_of(counts.combined, total_population);
    rep.percent_increment = percent_of(rep.tower_increment, total_population);
    return rep;
}

inline ScenarioReport scenario_report(const PopulationRaster &raster, const std::vector<TowerSite> &sites,
                                      const ScenarioParams &params, std::optional<double> total_population = {})
{
    std::vector<TowerSite> legacy, towers;
    for (const auto &s : sites)
        (is_legacy(s.kind) ? legacy : towers).push_back(s);

    CoverageCounts counts;
    const auto all = covered_population(raster, sites);
    counts.combined = all.persons;
    counts.legacy = legacy.empty() ? 0.0 : covered_population(raster, legacy).persons;
    counts.towers = towers.empty() ? 0.0 : covered_population(raster, towers).persons;

    ScenarioReport rep = build_scenario_report(counts, params, total_population.value_or(raster.total_population()));
    rep.warnings = all.warnings;
    for (const auto &s : sites)
    {
        SiteLoad load;
        load.id = s.id;
        load.kind = s.kind;
        load.radius_km = detail::site_radius(s);
        detail::for_each_cell_in_disk(raster, s.position, load.radius_km,
                                      [&](std::size_t r, std::size_t c) { load.persons += raster.persons(r, c); });
        load.active_users_low = load.persons * params.active_user_fraction_low;
        load.active_users_high = load.persons * params.active_user_fraction_high;
        load.active_users_adoption = load.persons * params.adoption_rate * params.active_share_of_subscribers;
        rep.sites.push_back(load);
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Greedy relocation

struct Placement
{
    LatLon position;
    double marginal_persons = 0.0;
};

struct RelocationResult
{
    std::vector<Placement> placements;
    double baseline_persons = 0.0; // covered by the fixed sites alone
    double final_persons = 0.0;    // fixed sites plus placements
};

// Cell centres every `stride` cells, sorted by (lat, lon).
inline std::vector<LatLon> candidate_grid(const PopulationRaster &raster, std::size_t stride = 1)
{
    if (stride == 0)
        throw InvalidArgument("candidate grid stride must be positive");
    std::vector<LatLon> out;
    for (std::size_t r = 0; r < raster.rows(); r += stride)
        for (std::size_t c = 0; c < raster.cols(); c += stride)
            out.push_back(raster.center(r, c));
    std::sort(out.begin(), out.end());
    return out;
}

// Places towers one at a time at the candidate with the largest marginal covered
// population. Ties go to the smallest (lat, lon). `fixed` sites are covered beforehand.
inline RelocationResult greedy_relocate(const PopulationRaster &raster, int n_towers, double radius_km,
                                        std::vector<LatLon> candidates, const std::vector<TowerSite> &fixed = {},
                                        int jobs = 1)
{
    if (n_towers < 0)
        throw InvalidArgument("relocate: tower count must be non-negative");
    if (!(radius_km > 0.0) || !std::isfinite(radius_km))
        throw InvalidArgument("relocate: radius must be positive");
    if (candidates.empty())
        throw InvalidArgument("relocate: empty candidate grid");
    std::sort(candidates.begin(), candidates.end());

    auto mask = fixed.empty() ? std::vector<std::uint8_t>(raster.rows() * raster.cols(), 0) : coverage_mask(raster, fixed);
    RelocationResult res;
    res.baseline_persons = masked_population(raster, mask);
    std::vector<double> gains(candidates.size());
    for (int t = 0; t < n_towers; ++t)
    {
        parallel_for(candidates.size(), jobs, [&](std::size_t i) {
            double gain = 0.0;
            detail::for_each_cell_in_disk(raster, candidates[i], radius_km, [&](std::size_t r, std::size_t c) {
                if (!mask[r * raster.cols() + c])
                    gain += raster.persons(r, c);
            });
            gains[i] = gain;
        });
        // first maximum in (lat, lon) order
        const std::size_t best = static_cast<std::size_t>(std::max_element(gains.begin(), gains.end()) - gains.begin());
        const double best_gain = gains[best];
        detail::for_each_cell_in_disk(raster, candidates[best], radius_km,
                                      [&](std::size_t r, std::size_t c) { mask[r * raster.cols() + c] = 1; });
        res.placements.push_back({candidates[best], best_gain});
    }
    res.final_persons = masked_population(raster, mask);
    return res;
}

// ---------------------------------------------------------------------------------------------
// GeoJSON

inline constexpr int circle_segments = 64;

inline std::vector<LatLon> circle_polygon(const LatLon &center, double radius_km, int segments = circle_segments)
{
    std::vector<LatLon> ring;
    for (int i = 0; i < segments; ++i)
        ring.push_back(destination(center, 360.0 * i / segments, radius_km));
    ring.push_back(ring.front());
    return ring;
}

namespace detail
{
inline std::string json_escape(const std::string &s)
{
    std::string out;
    for (char ch : s)
    {
        switch (ch)
        {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20)
            {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            }
            else
                out += ch;
        }
    }
    return out;
}
} // namespace detail

// FeatureCollection with one 64-segment circle per site. `extra_members` is a pre-serialized
// JSON object body (without braces) inserted at the top level, e.g. a config echo.
inline void write_geojson(std::ostream &os, const std::vector<TowerSite> &sites, const std::string &extra_members = {})
{
    os << "{\"type\":\"FeatureCollection\",";
    if (!extra_members.empty())
        os << extra_members << ',';
    os << "\"features\":[";
    os << std::fixed << std::setprecision(6);
    for (std::size_t i = 0; i < sites.size(); ++i)
    {
        const auto &s = sites[i];
        const double radius = detail::site_radius(s);
        os << (i ? "," : "") << "\n{\"type\":\"Feature\",\"properties\":{\"id\":\"" << detail::json_escape(s.id)
           << "\",\"kind\":\"" << to_string(s.kind) << "\",\"radius_km\":" << radius
           << "},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[[";
        const auto ring = circle_polygon(s.position, radius);
        for (std::size_t j = 0; j < ring.size(); ++j)
            os << (j ? "," : "") << '[' << ring[j].lon << ',' << ring[j].lat << ']';
        os << "]]}}";
    }
    os << "\n]}\n";
    os << std::defaultfloat;
}

inline void export_geojson(const std::filesystem::path &path, const std::vector<TowerSite> &sites,
                           const std::string &extra_members = {})
{
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write " + path.string());
    write_geojson(f, sites, extra_members);
    if (!f)
        throw IoError("failed writing " + path.string());
}

} // namespace towercov::geo

#endif
