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


#ifndef TOWERCOV_CHANNEL_HPP
#define TOWERCOV_CHANNEL_HPP

#include "array.hpp"
#include "errors.hpp"
#include "pathloss.hpp"
#include "random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace towercov
{

enum class Scenario
{
    rma_los,
    rma_nlos
};

inline std::string to_string(Scenario s) { return s == Scenario::rma_los ? "RMa-LoS" : "RMa-NLoS"; }

struct SiteConfig
{
    double tx_height_m = 25.0;
    double tx_power_w = 40.0;
    Scenario scenario = Scenario::rma_nlos;
    ArrayConfig array;

    // 25 m mast, 46 dBm, non-line-of-sight propagation.
    static SiteConfig legacy(int polarizations = 1)
    {
        SiteConfig s;
        s.array.polarizations = polarizations;
        return s;
    }

    // 150 m broadcast tower, 50 dBm, line-of-sight propagation.
    static SiteConfig high_tower(int polarizations = 1)
    {
        SiteConfig s;
        s.tx_height_m = 150.0;
        s.tx_power_w = 100.0;
        s.scenario = Scenario::rma_los;
        s.array.polarizations = polarizations;
        return s;
    }

    void validate(double rx_height_m) const
    {
        array.validate();
        if (!(tx_height_m > rx_height_m))
            throw InvalidConfig("site: transmitter must be above the receiver");
        if (!(tx_power_w > 0.0) || !std::isfinite(tx_power_w))
            throw InvalidConfig("site: transmit power must be positive");
    }
};

enum class Duplex
{
    fdd,
    tdd
};

inline std::string to_string(Duplex d) { return d == Duplex::fdd ? "FDD" : "TDD"; }

struct RadioConfig
{
    double carrier_frequency_hz = 700e6;
    double bandwidth_hz = 10e6;
    Duplex duplex = Duplex::fdd;
    double tdd_downlink_fraction = 0.75;
    double cp_overhead = 0.05;
    double noise_figure_db = 12.0; // calibrated receiver noise figure
    double target_rate_bps = 10e6;

    // The three NR bands studied: 700/1800 MHz FDD and 3500 MHz TDD.
    static RadioConfig band(double carrier_mhz)
    {
        RadioConfig r;
        r.carrier_frequency_hz = carrier_mhz * 1e6;
        if (carrier_mhz == 700.0)
            r.bandwidth_hz = 10e6;
        else if (carrier_mhz == 1800.0)
            r.bandwidth_hz = 20e6;
        else if (carrier_mhz == 3500.0)
        {
            r.bandwidth_hz = 100e6;
            r.duplex = Duplex::tdd;
        }
        else
            throw InvalidConfig("radio: no default band for " + std::to_string(carrier_mhz) + " MHz");
        return r;
    }

    double downlink_fraction() const { return duplex == Duplex::fdd ? 1.0 : tdd_downlink_fraction; }

    // Bandwidth available to the downlink, which is also the noise bandwidth.
    double downlink_bandwidth_hz() const { return downlink_fraction() * bandwidth_hz; }

    double noise_power_w() const
    {
        const double dbm = -174.0 + 10.0 * std::log10(downlink_bandwidth_hz()) + noise_figure_db;
        return std::pow(10.0, (dbm - 30.0) / 10.0);
    }

    double rate_bps(double sinr) const
    {
        return downlink_fraction() * (1.0 - cp_overhead) * bandwidth_hz * std::log2(1.0 + sinr);
    }

    void validate() const
    {
        if (!(carrier_frequency_hz > 0.0) || !(bandwidth_hz > 0.0))
            throw InvalidConfig("radio: carrier frequency and bandwidth must be positive");
        if (!(cp_overhead >= 0.0 && cp_overhead < 1.0))
            throw InvalidConfig("radio: cyclic prefix overhead must lie in [0, 1)");
        if (!(downlink_fraction() > 0.0 && downlink_fraction() <= 1.0))
            throw InvalidConfig("radio: downlink fraction must lie in (0, 1]");
        if (!std::isfinite(noise_figure_db) || !(target_rate_bps > 0.0))
            throw InvalidConfig("radio: invalid noise figure or target rate");
    }
};

inline constexpr double min_drop_distance_m = 35.0;

struct UserDrop
{
    std::vector<double> distance_m;
    std::vector<double> azimuth_deg;
    double rx_height_m = 8.0;

    std::size_t size() const { return distance_m.size(); }
};

// Parameters of the clustered small-scale model and log-normal shadowing.
struct FadingParams
{
    double rician_k_mean_db = 7.0;
    double rician_k_std_db = 4.0;
    int n_clusters = 11;
    double azimuth_spread_deg = 8.0;
    double zenith_spread_deg = 2.0;
    double xpr_mean_db = 12.0;
    double shadow_sigma_los_db = 4.0;       // up to the breakpoint
    double shadow_sigma_los_far_db = 4.0;   // beyond the breakpoint
    double shadow_sigma_nlos_db = 8.0;

    static FadingParams for_scenario(Scenario s)
    {
        FadingParams f;
        if (s == Scenario::rma_nlos)
        {
            f.n_clusters = 10;
            f.azimuth_spread_deg = 9.0;
            f.zenith_spread_deg = 6.0;
            f.xpr_mean_db = 15.0;
        }
        return f;
    }

    void validate() const
    {
        if (n_clusters < 1)
            throw InvalidConfig("fading: at least one cluster required");
        if (!(azimuth_spread_deg >= 0.0) || !(zenith_spread_deg >= 0.0) || !(rician_k_std_db >= 0.0) ||
            !(shadow_sigma_los_db >= 0.0) || !(shadow_sigma_los_far_db >= 0.0) || !(shadow_sigma_nlos_db >= 0.0))
            throw InvalidConfig("fading: spreads must be non-negative");
        if (std::isnan(rician_k_mean_db) || std::isnan(xpr_mean_db))
            throw InvalidConfig("fading: K-factor and XPR must be numbers");
    }
};

// Downlink channel: column k is user k's M-element response including large-scale gain.
struct ChannelMatrix
{
    Eigen::MatrixXcd h;
    std::vector<double> large_scale_gain; // linear, path loss and shadowing
    std::vector<double> pathloss_db;
    std::vector<double> shadowing_db;
    std::vector<double> los_azimuth_deg;
    std::vector<double> los_elevation_deg;

    Eigen::Index antennas() const { return h.rows(); }
    Eigen::Index users() const { return h.cols(); }
};

namespace detail
{

// Steering vector of a cylindrical layout built by build_geometry, using the separable
// column/ring structure instead of one exponential per element.
inline void cylinder_steering(const ArrayGeometry &g, double wavenumber, double az_rad, double el_rad,
                              std::vector<std::complex<double>> &column, std::vector<std::complex<double>> &ring,
                              Eigen::Ref<Eigen::VectorXcd> out)
{
    const auto &cfg = g.config;
    const double ce = std::cos(el_rad);
    const double se = std::sin(el_rad);
    column.resize(static_cast<std::size_t>(cfg.m_h));
    ring.resize(static_cast<std::size_t>(cfg.m_v));
    for (int c = 0; c < cfg.m_h; ++c)
    {
        const double phi = 2.0 * std::numbers::pi * c / cfg.m_h;
        column[static_cast<std::size_t>(c)] = std::polar(1.0, wavenumber * g.radius_m * ce * std::cos(az_rad - phi));
    }
    const double pitch = cfg.m_v > 1 ? g.height_m / (cfg.m_v - 1) : 0.0;
    for (int v = 0; v < cfg.m_v; ++v)
    {
        const double z = (v - 0.5 * (cfg.m_v - 1)) * pitch;
        ring[static_cast<std::size_t>(v)] = std::polar(1.0, wavenumber * z * se);
    }
    Eigen::Index m = 0;
    for (int v = 0; v < cfg.m_v; ++v)
        for (int c = 0; c < cfg.m_h; ++c)
        {
            const auto a = ring[static_cast<std::size_t>(v)] * column[static_cast<std::size_t>(c)];
            for (int p = 0; p < cfg.polarizations; ++p)
                out[m++] = a;
        }
}

} // namespace detail

// Flat-fading clustered channel. Each user draws from its own stream derived from
// (seed, user index), so a drop of K users reproduces the first K users of any larger drop.
//
// Per user: beta = 10^(-(PL + SF)/10); LoS users get a Rician mix of the specular steering
// vector and a diffuse part, NLoS users the diffuse part only. The diffuse part sums one
// ray per cluster with Laplacian angular offsets and unit complex Gaussian weights,
// scaled so that E|g|^2 = M. Slanted elements couple the co- and cross-polar ray fields,
// the latter attenuated by the XPR, for a vertically polarized receiver.
inline ChannelMatrix generate_channel(const SiteConfig &site, const RadioConfig &radio, const UserDrop &drop,
                                      const FadingParams &fading, std::uint64_t seed)
{
    site.validate(drop.rx_height_m);
    radio.validate();
    fading.validate();
    if (drop.size() == 0)
        throw InvalidDrop("channel: drop contains no users");
    if (drop.azimuth_deg.size() != drop.size())
        throw InvalidDrop("channel: distance and azimuth lists differ in length");
    for (double d : drop.distance_m)
        if (!(d >= min_drop_distance_m) || !std::isfinite(d))
            throw InvalidDrop("channel: user closer than the 35 m minimum distance");

    const ArrayGeometry geom = build_geometry(site.array, radio.carrier_frequency_hz);
    const double fc = radio.carrier_frequency_hz;
    const double k_wave = 2.0 * std::numbers::pi / wavelength(fc);
    const Eigen::Index M = geom.size();
    const auto K = static_cast<Eigen::Index>(drop.size());
    const int n_cl = fading.n_clusters;
    const bool dual = site.array.polarizations == 2;
    const double h_bs = site.tx_height_m;
    const double h_ut = drop.rx_height_m;

    ChannelMatrix out;
    out.h.resize(M, K);
    out.large_scale_gain.resize(drop.size());
    out.pathloss_db.resize(drop.size());
    out.shadowing_db.resize(drop.size());
    out.los_azimuth_deg = drop.azimuth_deg;
    out.los_elevation_deg.resize(drop.size());

    const double xpr = std::pow(10.0, fading.xpr_mean_db / 10.0);
    // Per-port weights for +45/-45 slants from the co-polar (v) and cross-polar (x) ray fields.
    const double port_norm = 1.0 / std::sqrt(0.5 * (1.0 + 1.0 / xpr));
    const double cross_scale = 1.0 / std::sqrt(xpr);

    std::vector<std::complex<double>> column, ring;
    Eigen::VectorXcd a(M), diffuse(M);
    std::vector<double> cl_az(static_cast<std::size_t>(n_cl)), cl_el(static_cast<std::size_t>(n_cl));
    std::vector<std::complex<double>> v(static_cast<std::size_t>(n_cl)), x(static_cast<std::size_t>(n_cl));

    for (Eigen::Index k = 0; k < K; ++k)
    {
        const auto ku = static_cast<std::size_t>(k);
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));

        const double d2 = drop.distance_m[ku];
        const double el_deg = -rad2deg(std::atan2(h_bs - h_ut, d2));
        out.los_elevation_deg[ku] = el_deg;

        double pl = 0.0, sigma = 0.0;
        if (site.scenario == Scenario::rma_los)
        {
            pl = rma::pathloss_los(d2, fc, h_bs, h_ut);
            sigma = d2 <= rma::breakpoint_distance(fc, h_bs, h_ut) ? fading.shadow_sigma_los_db
                                                                   : fading.shadow_sigma_los_far_db;
        }
        else
        {
            pl = rma::pathloss_nlos(d2, fc, h_bs, h_ut);
            sigma = fading.shadow_sigma_nlos_db;
        }
        const double sf = sigma * standard_normal(rng);
        const double beta = std::pow(10.0, -(pl + sf) / 10.0);
        out.pathloss_db[ku] = pl;
        out.shadowing_db[ku] = sf;
        out.large_scale_gain[ku] = beta;

        const double k_db = fading.rician_k_mean_db + fading.rician_k_std_db * standard_normal(rng);

        for (int c = 0; c < n_cl; ++c)
        {
            cl_az[static_cast<std::size_t>(c)] = drop.azimuth_deg[ku] + laplacian(rng, fading.azimuth_spread_deg);
            cl_el[static_cast<std::size_t>(c)] = el_deg + laplacian(rng, fading.zenith_spread_deg);
        }
        for (int c = 0; c < n_cl; ++c)
            v[static_cast<std::size_t>(c)] = complex_normal(rng);
        if (dual)
            for (int c = 0; c < n_cl; ++c)
                x[static_cast<std::size_t>(c)] = complex_normal(rng);

        diffuse.setZero();
        for (int c = 0; c < n_cl; ++c)
        {
            const auto cu = static_cast<std::size_t>(c);
            detail::cylinder_steering(geom, k_wave, deg2rad(cl_az[cu]), deg2rad(cl_el[cu]), column, ring, a);
            if (!dual)
                diffuse.noalias() += v[cu] * a;
            else
            {
                const auto w_plus = port_norm * std::numbers::sqrt2 / 2.0 * (v[cu] + cross_scale * x[cu]);
                const auto w_minus = port_norm * std::numbers::sqrt2 / 2.0 * (v[cu] - cross_scale * x[cu]);
                for (Eigen::Index m = 0; m < M; m += 2)
                {
                    diffuse[m] += w_plus * a[m];
                    diffuse[m + 1] += w_minus * a[m + 1];
                }
            }
        }
        diffuse /= std::sqrt(static_cast<double>(n_cl));

        auto col = out.h.col(k);
        if (site.scenario == Scenario::rma_los)
        {
            detail::cylinder_steering(geom, k_wave, deg2rad(drop.azimuth_deg[ku]), deg2rad(el_deg), column, ring, a);
            if (std::isinf(k_db) && k_db > 0.0)
                col = a;
            else
            {
                const double kappa = std::pow(10.0, k_db / 10.0);
                col = std::sqrt(kappa / (kappa + 1.0)) * a + std::sqrt(1.0 / (kappa + 1.0)) * diffuse;
            }
        }
        else
            col = diffuse;
        col *= std::sqrt(beta);
    }
    return out;
}

// Long-format dump: one row per (antenna, user) entry.
inline void write_channel_csv(std::ostream &os, const ChannelMatrix &ch)
{
    const auto old_flags = os.flags();
    const auto old_prec = os.precision();
    os << "antenna,user,re,im\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index k = 0; k < ch.users(); ++k)
        for (Eigen::Index m = 0; m < ch.antennas(); ++m)
            os << m << ',' << k << ',' << ch.h(m, k).real() << ',' << ch.h(m, k).imag() << '\n';
    os.flags(old_flags);
    os.precision(old_prec);
}

} // namespace towercov

#endif
