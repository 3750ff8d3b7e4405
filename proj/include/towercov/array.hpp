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


#ifndef TOWERCOV_ARRAY_HPP
#define TOWERCOV_ARRAY_HPP

#include "errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace towercov
{

inline constexpr double speed_of_light = 299792458.0;

inline double wavelength(double carrier_frequency_hz) { return speed_of_light / carrier_frequency_hz; }

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Uniform cylindrical array layout: m_h columns around the cylinder, m_v rings, one or two
// polarizations per position. Spacing is in wavelengths.
struct ArrayConfig
{
    int m_h = 32;
    int m_v = 8;
    int polarizations = 1;
    double spacing = 0.5;

    int element_count() const { return m_h * m_v * polarizations; }

    void validate() const
    {
        if (m_h < 1 || m_v < 1)
            throw InvalidConfig("array: element counts must be at least 1");
        if (polarizations != 1 && polarizations != 2)
            throw InvalidConfig("array: polarizations must be 1 or 2");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw InvalidConfig("array: spacing must be positive");
    }
};

struct ArrayGeometry
{
    ArrayConfig config;
    double carrier_frequency_hz = 0.0;
    Eigen::Matrix3Xd element_positions;            // meters, cylinder axis along z, origin at the center
    std::vector<double> element_polarization_deg;  // slant from vertical
    double radius_m = 0.0;
    double height_m = 0.0;

    Eigen::Index size() const { return element_positions.cols(); }
};

// Elements are indexed ring-major, then column, then polarization:
// m = (ring * m_h + column) * polarizations + pol.
inline ArrayGeometry build_geometry(const ArrayConfig &config, double carrier_frequency_hz)
{
    config.validate();
    if (!(carrier_frequency_hz > 0.0) || !std::isfinite(carrier_frequency_hz))
        throw InvalidConfig("array: carrier frequency must be positive");

    const double lambda = wavelength(carrier_frequency_hz);
    const double pitch = config.spacing * lambda;

    ArrayGeometry g;
    g.config = config;
    g.carrier_frequency_hz = carrier_frequency_hz;
    // A single column has no circumference to wrap around.
    g.radius_m = config.m_h > 1 ? config.m_h * pitch / (2.0 * std::numbers::pi) : 0.0;
    g.height_m = (config.m_v - 1) * pitch;

    const int n = config.element_count();
    g.element_positions.resize(3, n);
    g.element_polarization_deg.resize(static_cast<std::size_t>(n));

    int m = 0;
    for (int v = 0; v < config.m_v; ++v)
    {
        const double z = (v - 0.5 * (config.m_v - 1)) * pitch;
        for (int c = 0; c < config.m_h; ++c)
        {
            const double phi = 2.0 * std::numbers::pi * c / config.m_h;
            for (int p = 0; p < config.polarizations; ++p, ++m)
            {
                g.element_positions.col(m) << g.radius_m * std::cos(phi), g.radius_m * std::sin(phi), z;
                g.element_polarization_deg[static_cast<std::size_t>(m)] =
                    config.polarizations == 1 ? 0.0 : (p == 0 ? 45.0 : -45.0);
            }
        }
    }
    return g;
}

// Unit propagation vector for a departure direction. Elevation is measured from the
// horizontal plane, positive upward.
inline Eigen::Vector3d direction_vector(double azimuth_deg, double elevation_deg)
{
    const double az = deg2rad(azimuth_deg);
    const double el = deg2rad(elevation_deg);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

inline void check_frequency(const ArrayGeometry &geometry, double carrier_frequency_hz)
{
    const double f0 = geometry.carrier_frequency_hz;
    if (!(carrier_frequency_hz > 0.0) || std::abs(carrier_frequency_hz - f0) > 1e-9 * f0)
        throw InvalidArgument("steering vector requested at a frequency the geometry was not built for");
}

inline Eigen::VectorXcd steering_vector(const ArrayGeometry &geometry, double azimuth_deg, double elevation_deg,
                                        double carrier_frequency_hz)
{
    check_frequency(geometry, carrier_frequency_hz);
    const double k = 2.0 * std::numbers::pi / wavelength(carrier_frequency_hz);
    const Eigen::VectorXd phase = k * (geometry.element_positions.transpose() * direction_vector(azimuth_deg, elevation_deg));
    Eigen::VectorXcd a(phase.size());
    for (Eigen::Index m = 0; m < phase.size(); ++m)
        a[m] = std::polar(1.0, phase[m]);
    return a;
}

} // namespace towercov

#endif
