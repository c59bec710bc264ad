// SPDX-License-Identifier: Apache-2.0
//! \file barenblatt.cpp
#include "pbm/barenblatt.hpp"

#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

namespace pbm
{
namespace
{
//---------------------------------------------------------------------------//
void require_time(double s)
{
    if (!(s > 0) || !std::isfinite(s))
    {
        throw std::invalid_argument("physical time must be positive, got "
                                    + format_double(s));
    }
}

double distance(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size())
    {
        throw std::invalid_argument("point and center dimensions differ");
    }
    double sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double const diff = x[i] - y[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

Point scaled_offset(std::span<double const> x,
                    std::span<double const> y,
                    double factor)
{
    Point out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        out[i] = factor * (x[i] - y[i]);
    }
    return out;
}

//! C1 - q s^{-kp/(d(p-1))} r^{p/(p-1)}, not yet clipped
double profile_argument(BarenblattParams const& P, double s, double r)
{
    return P.C1
           - P.q * std::pow(s, -P.radius_time_exponent())
                 * std::pow(r, P.radius_power());
}

//! Leading constant (qp/(p-2)) of the gradient
double gradient_constant(BarenblattParams const& P)
{
    return P.q * P.p / (P.p - 2);
}
//---------------------------------------------------------------------------//
}  // namespace

//---------------------------------------------------------------------------//
double support_radius(BarenblattParams const& params, double s)
{
    require_time(s);
    return params.beta * std::pow(s, params.k / params.d);
}

double support_radius_direct(BarenblattParams const& params, double s)
{
    require_time(s);
    return std::pow(params.C1 * std::pow(s, params.radius_time_exponent())
                        / params.q,
                    (params.p - 1) / params.p);
}

//---------------------------------------------------------------------------//
double density_radial(BarenblattParams const& params, double s, double r)
{
    require_time(s);
    double const g = profile_argument(params, s, r);
    if (!(g > 0) || r >= support_radius(params, s))
    {
        return 0;
    }
    return std::pow(s, -params.k) * std::pow(g, params.profile_power());
}

//---------------------------------------------------------------------------//
double gradient_coefficient(BarenblattParams const& params, double s, double r)
{
    require_time(s);
    if (!(r > 0))
    {
        return 0;
    }
    double const g = profile_argument(params, s, r);
    if (!(g > 0) || r >= support_radius(params, s))
    {
        return 0;
    }
    double const p = params.p;
    return -gradient_constant(params)
           * std::pow(s, -params.k - params.radius_time_exponent())
           * std::pow(g, 1 / (p - 2)) * std::pow(r, (2 - p) / (p - 1));
}

//---------------------------------------------------------------------------//
double diffusion_radial(BarenblattParams const& params, double s, double r)
{
    require_time(s);
    if (!(r > 0))
    {
        return 0;
    }
    double const g = profile_argument(params, s, r);
    if (!(g > 0) || r >= support_radius(params, s))
    {
        return 0;
    }
    double const p = params.p;
    return std::pow(gradient_constant(params), p - 2)
           * std::pow(s, params.diffusion_time_exponent()) * g
           * std::pow(r, (p - 2) / (p - 1));
}

//---------------------------------------------------------------------------//
double drift_coefficient(BarenblattParams const& params, double s, double r)
{
    require_time(s);
    if (!(r > 0))
    {
        throw std::domain_error(
            "drift is singular at the center (|x - y| = 0); use the tamed "
            "evaluator of the SDE engine");
    }
    double const radius = support_radius(params, s);
    if (r > radius)
    {
        return 0;
    }
    double const p = params.p;
    double g = profile_argument(params, s, r);
    if (g < 0)
    {
        g = 0;
    }
    double const amp = std::pow(gradient_constant(params), p - 2)
                       * std::pow(s, params.diffusion_time_exponent());
    return amp
           * ((p - 2) / (p - 1) * g * std::pow(r, -p / (p - 1))
              - params.q * p / (p - 1)
                    * std::pow(s, -params.radius_time_exponent()));
}

//---------------------------------------------------------------------------//
double analytic_radial_cdf(BarenblattParams const& params, double s, double r)
{
    double const radius = support_radius(params, s);
    if (!(r > 0))
    {
        return 0;
    }
    if (r >= radius)
    {
        return 1;
    }
    double const m = params.radius_power();
    double const z = std::pow(r / radius, m);
    return boost::math::ibeta(params.d / m, params.profile_power() + 1, z);
}

//---------------------------------------------------------------------------//
double density(BarenblattParams const& params,
               std::span<double const> y,
               double t,
               std::span<double const> x)
{
    return density_radial(params, t, distance(x, y));
}

Point gradient(BarenblattParams const& params,
               std::span<double const> y,
               double t,
               std::span<double const> x)
{
    double const r = distance(x, y);
    return scaled_offset(x, y, gradient_coefficient(params, t, r));
}

double diffusion_a(BarenblattParams const& params,
                   std::span<double const> y,
                   double delta,
                   double t,
                   std::span<double const> x)
{
    return diffusion_radial(params, t + delta, distance(x, y));
}

Point drift_b(BarenblattParams const& params,
              std::span<double const> y,
              double delta,
              double t,
              std::span<double const> x)
{
    double const r = distance(x, y);
    return scaled_offset(x, y, drift_coefficient(params, t + delta, r));
}

//---------------------------------------------------------------------------//
CoefficientSlice::CoefficientSlice(BarenblattParams const& params, double s)
    : s_(s)
    , radius_(support_radius(params, s))
    , c1_(params.C1)
    , inv_pm1_(1 / (params.p - 1))
    , alpha_((params.p - 2) / (params.p - 1))
    , amp_(std::pow(gradient_constant(params), params.p - 2)
           * std::pow(s, params.diffusion_time_exponent()))
    , tau_(params.q * std::pow(s, -params.radius_time_exponent()))
    , inward_(params.p / (params.p - 1) * tau_)
{
}

//---------------------------------------------------------------------------//
CoefficientField::CoefficientField(BarenblattParams params,
                                   Point center,
                                   double delta)
    : params_(params), center_(std::move(center)), delta_(delta)
{
    if (delta < 0)
    {
        throw std::invalid_argument("time offset delta must be >= 0");
    }
}

double CoefficientField::density(double t, std::span<double const> x) const
{
    return pbm::density(params_, center_, t + delta_, x);
}

Point CoefficientField::gradient(double t, std::span<double const> x) const
{
    return pbm::gradient(params_, center_, t + delta_, x);
}

double CoefficientField::diffusion(double t, std::span<double const> x) const
{
    return diffusion_a(params_, center_, delta_, t, x);
}

Point CoefficientField::drift(double t, std::span<double const> x) const
{
    return drift_b(params_, center_, delta_, t, x);
}

double CoefficientField::sigma(double t, std::span<double const> x) const
{
    return std::sqrt(2 * diffusion(t, x));
}

//---------------------------------------------------------------------------//
std::vector<ExponentCheck> check_exponents(BarenblattParams const& params)
{
    double const d = params.d;
    double const p = params.p;
    double const k = params.k;
    double const base = params.diffusion_time_exponent();
    double const e_scaled = k * p / (d * (p - 1));

    std::vector<ExponentCheck> out;
    auto add = [&out](std::string name, std::string ineq, double lhs) {
        out.push_back({std::move(name), std::move(ineq), lhs, lhs > -1});
    };
    add("diffusion",
        "-k(p-2)(1+p/(d(p-1))) > -1",
        base);
    add("diffusion_times_density",
        "-k(p-2)(1+p/(d(p-1))) + (k/d)(p-2)/(p-1) > -1",
        base + k / d * (p - 2) / (p - 1));
    add("drift_inward_term",
        "-k(p-2)(1+p/(d(p-1))) - kp/(d(p-1)) + k/d > -1",
        base - e_scaled + k / d);
    add("drift_singular_term",
        "-k(p-2)(1+p/(d(p-1))) + k(d(p-1)-1)/(d(p-1)) - k > -1",
        base + k * (d * (p - 1) - 1) / (d * (p - 1)) - k);
    return out;
}

//---------------------------------------------------------------------------//
}  // namespace pbm
