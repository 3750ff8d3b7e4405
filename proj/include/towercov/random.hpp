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


#ifndef TOWERCOV_RANDOM_HPP
#define TOWERCOV_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace towercov
{

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Hierarchical seed derivation: the result depends only on the master seed and the
// index path, never on the order in which work items are scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = splitmix64(master);
    for (auto v : path)
        s = splitmix64(s ^ splitmix64(v + 0x632be59bd9b4e019ULL));
    return s;
}

// The standard distributions are implementation-defined; these samplers keep streams
// identical across standard libraries.
inline double uniform01(Rng &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng &rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline double standard_normal(Rng &rng)
{
    double u1 = uniform01(rng);
    while (u1 <= 0.0)
        u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Zero-mean Laplacian with the given standard deviation.
inline double laplacian(Rng &rng, double std_dev)
{
    const double b = std_dev / std::numbers::sqrt2;
    double u = uniform01(rng) - 0.5;
    while (std::abs(u) >= 0.5)
        u = uniform01(rng) - 0.5;
    return -b * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

// Circularly-symmetric complex Gaussian with unit variance.
inline std::complex<double> complex_normal(Rng &rng)
{
    const double re = standard_normal(rng);
    const double im = standard_normal(rng);
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

} // namespace towercov

#endif
