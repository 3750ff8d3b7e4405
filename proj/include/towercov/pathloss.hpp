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


#ifndef TOWERCOV_PATHLOSS_HPP
#define TOWERCOV_PATHLOSS_HPP

// Rural-macro (RMa) large-scale models from 3GPP TR 38.901, Table 7.4.1-1.

#include "array.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace towercov::rma
{

inline constexpr double building_height_m = 5.0;
inline constexpr double street_width_m = 20.0;
inline constexpr double min_distance_2d_m = 10.0;

inline double breakpoint_distance(double fc_hz, double h_bs, double h_ut)
{
    return 2.0 * std::numbers::pi * h_bs * h_ut * fc_hz / speed_of_light;
}

inline double distance_3d(double d2d, double h_bs, double h_ut) { return std::hypot(d2d, h_bs - h_ut); }

namespace detail
{
inline void check_inputs(double d2d, double fc_hz, double h_bs, double h_ut)
{
    if (!(d2d >= min_distance_2d_m))
        throw OutOfRange("RMa path loss: 2-D distance below 10 m");
    if (!(h_ut >= 1.0 && h_ut <= 10.0))
        throw OutOfRange("RMa path loss: UT height outside [1, 10] m");
    if (!(fc_hz > 0.0) || !(h_bs > 0.0))
        throw OutOfRange("RMa path loss: frequency and BS height must be positive");
}

inline double pl1(double d3d, double fc_hz)
{
    const double h = building_height_m;
    const double fc_ghz = fc_hz / 1e9;
    return 20.0 * std::log10(40.0 * std::numbers::pi * d3d * fc_ghz / 3.0) +
           std::min(0.03 * std::pow(h, 1.72), 10.0) * std::log10(d3d) - std::min(0.044 * std::pow(h, 1.72), 14.77) +
           0.002 * std::log10(h) * d3d;
}

inline double pl2(double d3d, double d_bp, double fc_hz) { return pl1(d_bp, fc_hz) + 40.0 * std::log10(d3d / d_bp); }
} // namespace detail

// Two-slope LoS loss in dB. Beyond 10 km the model is extrapolated.
inline double pathloss_los(double d2d, double fc_hz, double h_bs, double h_ut)
{
    detail::check_inputs(d2d, fc_hz, h_bs, h_ut);
    const double d_bp = breakpoint_distance(fc_hz, h_bs, h_ut);
    const double d3d = distance_3d(d2d, h_bs, h_ut);
    if (d2d <= d_bp)
        return detail::pl1(d3d, fc_hz);
    return detail::pl2(d3d, d_bp, fc_hz);
}

inline double pathloss_nlos(double d2d, double fc_hz, double h_bs, double h_ut)
{
    detail::check_inputs(d2d, fc_hz, h_bs, h_ut);
    const double h = building_height_m;
    const double w = street_width_m;
    const double d3d = distance_3d(d2d, h_bs, h_ut);
    const double nlos = 161.04 - 7.1 * std::log10(w) + 7.5 * std::log10(h) -
                        (24.37 - 3.7 * (h / h_bs) * (h / h_bs)) * std::log10(h_bs) +
                        (43.42 - 3.1 * std::log10(h_bs)) * (std::log10(d3d) - 3.0) + 20.0 * std::log10(fc_hz / 1e9) -
                        (3.2 * std::pow(std::log10(11.75 * h_ut), 2) - 4.97);
    return std::max(pathloss_los(d2d, fc_hz, h_bs, h_ut), nlos);
}

} // namespace towercov::rma

#endif
