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


#ifndef TOWERCOV_MIMO_HPP
#define TOWERCOV_MIMO_HPP

#include "channel.hpp"
#include "errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace towercov
{

struct PrecodeResult
{
    Eigen::MatrixXcd w; // M x K, unit-norm columns
    double regularization = 0.0;
};

// Default regularization K * noise / P.
inline double rzf_regularization(Eigen::Index users, double noise_power_w, double total_power_w)
{
    return static_cast<double>(users) * noise_power_w / total_power_w;
}

// W proportional to H (H^H H + alpha I)^-1, each column normalized.
// Passing alpha = 0 gives zero forcing.
inline PrecodeResult rzf_precode(const Eigen::MatrixXcd &h, double noise_power_w, double total_power_w,
                                 std::optional<double> alpha = std::nullopt)
{
    const Eigen::Index M = h.rows();
    const Eigen::Index K = h.cols();
    if (K == 0 || K > M)
        throw InvalidArgument("rzf: need 1 <= K <= M users");
    if (!h.allFinite())
        throw InvalidArgument("rzf: channel has non-finite entries");
    if (!(noise_power_w > 0.0) || !(total_power_w > 0.0))
        throw InvalidArgument("rzf: noise and total power must be positive");

    PrecodeResult r;
    r.regularization = alpha ? *alpha : rzf_regularization(K, noise_power_w, total_power_w);
    if (!(r.regularization >= 0.0))
        throw InvalidArgument("rzf: regularization must be non-negative");

    Eigen::MatrixXcd gram = h.adjoint() * h;
    gram.diagonal().array() += r.regularization;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(gram);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
        throw NumericalError("rzf: Gram matrix is singular or ill-conditioned (rcond " + std::to_string(rcond) + ")",
                             rcond);
    r.w = h * lu.inverse();
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double n = r.w.col(k).norm();
        if (!(n > 0.0))
            throw NumericalError("rzf: zero precoding column", rcond);
        r.w.col(k) /= n;
    }
    return r;
}

// G(k, j) = |h_k^H w_j|^2: power user k receives from the beam of user j.
inline Eigen::MatrixXd effective_gains(const Eigen::MatrixXcd &h, const Eigen::MatrixXcd &w)
{
    if (h.rows() != w.rows() || h.cols() != w.cols())
        throw InvalidArgument("effective_gains: H and W must have the same shape");
    return (h.adjoint() * w).cwiseAbs2();
}

inline Eigen::VectorXd sinr(const Eigen::MatrixXd &g, const Eigen::VectorXd &p, double noise_power_w)
{
    const Eigen::VectorXd received = g * p;
    Eigen::VectorXd s(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k)
    {
        const double signal = p[k] * g(k, k);
        s[k] = signal / (noise_power_w + received[k] - signal);
    }
    return s;
}

struct PowerAllocation
{
    Eigen::VectorXd p;         // watts per user
    double common_sinr = 0.0;  // linear
    int iterations = 0;
};

struct MaxMinOptions
{
    double relative_tolerance = 1e-12;
    int max_iterations = 200;
};

namespace detail
{
// Powers meeting SINR target t for every user: (D - t F) p = t * noise * 1.
// A positive solution exists exactly when the target is reachable without a power cap.
inline std::optional<Eigen::VectorXd> powers_for_target(const Eigen::MatrixXd &g, double noise, double t)
{
    Eigen::MatrixXd a = -t * g;
    a.diagonal() = g.diagonal();
    const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(g.rows(), t * noise);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd p = lu.solve(rhs);
    if (!p.allFinite() || (p.array() <= 0.0).any())
        return std::nullopt;
    return p;
}
} // namespace detail

// Max-min SINR power control for fixed beams: bisection on the common SINR target with one
// linear solve per step. The final powers are scaled to use the whole budget.
inline PowerAllocation maxmin_power(const Eigen::MatrixXd &g, double noise_power_w, double total_power_w,
                                    const MaxMinOptions &opt = {})
{
    const Eigen::Index K = g.rows();
    if (K == 0 || g.cols() != K)
        throw InvalidArgument("maxmin_power: gain matrix must be square and non-empty");
    if (!g.allFinite() || (g.array() < 0.0).any())
        throw InvalidArgument("maxmin_power: gains must be finite and non-negative");
    if (!(noise_power_w > 0.0) || !(total_power_w > 0.0))
        throw InvalidArgument("maxmin_power: noise and total power must be positive");
    if ((g.diagonal().array() <= 0.0).any())
        throw DegenerateChannel("maxmin_power: a user has zero gain on its own beam");

    double lo = 0.0;
    double hi = total_power_w * g.diagonal().maxCoeff() / noise_power_w;
    Eigen::VectorXd best = Eigen::VectorXd::Zero(K);
    PowerAllocation out;
    bool converged = false;
    for (out.iterations = 1; out.iterations <= opt.max_iterations; ++out.iterations)
    {
        const double t = 0.5 * (lo + hi);
        const auto p = detail::powers_for_target(g, noise_power_w, t);
        if (p && p->sum() <= total_power_w)
        {
            lo = t;
            best = *p;
        }
        else
            hi = t;
        if (lo > 0.0 && hi - lo <= opt.relative_tolerance * lo)
        {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("maxmin_power: bisection did not converge in " + std::to_string(opt.max_iterations) +
                             " iterations");

    out.p = best * (total_power_w / best.sum());
    out.common_sinr = sinr(g, out.p, noise_power_w).minCoeff();
    return out;
}

struct RateReport
{
    Eigen::VectorXd sinr;
    Eigen::VectorXd rate_bps;
};

inline RateReport user_rates(const PowerAllocation &alloc, const Eigen::MatrixXd &g, double noise_power_w,
                             const RadioConfig &radio)
{
    radio.validate();
    if (alloc.p.size() != g.rows() || g.rows() != g.cols())
        throw InvalidArgument("user_rates: allocation and gain matrix sizes differ");
    if ((alloc.p.array() < 0.0).any())
        throw InvalidArgument("user_rates: negative power");
    RateReport r;
    r.sinr = sinr(g, alloc.p, noise_power_w);
    r.rate_bps = r.sinr.unaryExpr([&](double s) { return radio.rate_bps(s); });
    return r;
}

// Rate from already-known SINRs.
inline RateReport user_rates(const Eigen::VectorXd &sinr_values, const RadioConfig &radio)
{
    radio.validate();
    if ((sinr_values.array() < 0.0).any())
        throw InvalidArgument("user_rates: negative SINR");
    RateReport r;
    r.sinr = sinr_values;
    r.rate_bps = sinr_values.unaryExpr([&](double s) { return radio.rate_bps(s); });
    return r;
}

} // namespace towercov

#endif
