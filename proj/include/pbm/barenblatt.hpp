// SPDX-License-Identifier: Apache-2.0
//! \file pbm/barenblatt.hpp
//! Closed-form Barenblatt density, its gradient and the Fokker-Planck
//! coefficient fields a = |grad w|^{p-2} and b = grad a.
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "params.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
using Point = std::vector<double>;

//! Physical time s = t + delta at which closed forms are evaluated
struct SpaceTimePoint
{
    double t{};
    Point x;
    Point y;
    double delta{};

    double physical_time() const { return t + delta; }
};

//---------------------------------------------------------------------------//
// Radial profiles at physical time s and distance r = |x - y| from the center
//---------------------------------------------------------------------------//

// R(s) = beta s^{k/d}
double support_radius(BarenblattParams const& params, double s);

// Same radius via (C1 s^{kp/(d(p-1))} / q)^{(p-1)/p}
double support_radius_direct(BarenblattParams const& params, double s);

double density_radial(BarenblattParams const& params, double s, double r);

// G with grad w = G (x - y); zero outside the support and at r = 0
double gradient_coefficient(BarenblattParams const& params, double s, double r);

// a(s, r) = |grad w|^{p-2}; zero at r = 0 and for r >= R(s)
double diffusion_radial(BarenblattParams const& params, double s, double r);

// B with grad a = B (x - y); zero for r > R(s); throws at r = 0
double drift_coefficient(BarenblattParams const& params, double s, double r);

// Radial CDF P(|X - y| <= r) for X ~ w(s,x)dx via the regularized incomplete
// beta function I_{(r/R)^{p/(p-1)}}(d(p-1)/p, (p-1)/(p-2) + 1)
double analytic_radial_cdf(BarenblattParams const& params, double s, double r);

//---------------------------------------------------------------------------//
// Vector evaluators; center y, time t > 0 (delta folded into t by callers)
//---------------------------------------------------------------------------//

double density(BarenblattParams const& params,
               std::span<double const> y,
               double t,
               std::span<double const> x);

Point gradient(BarenblattParams const& params,
               std::span<double const> y,
               double t,
               std::span<double const> x);

double diffusion_a(BarenblattParams const& params,
                   std::span<double const> y,
                   double delta,
                   double t,
                   std::span<double const> x);

Point drift_b(BarenblattParams const& params,
              std::span<double const> y,
              double delta,
              double t,
              std::span<double const> x);

//---------------------------------------------------------------------------//
/*!
 * Time-frozen coefficients for the hot loops of the SDE engine and the PDE
 * solvers. All time powers are computed once per physical time.
 */
class CoefficientSlice
{
  public:
    CoefficientSlice() = default;
    CoefficientSlice(BarenblattParams const& params, double s);

    struct Values
    {
        double a;  //!< diffusion coefficient
        double B;  //!< drift = B (x - y)
    };

    double time() const { return s_; }
    double radius() const { return radius_; }

    //! a(s, r); zero at r = 0 and for r >= R
    double diffusion(double r) const
    {
        if (!(r > 0) || r >= radius_)
        {
            return 0;
        }
        double const root = std::pow(r, inv_pm1_);
        double g = c1_ - tau_ * r * root;
        return g > 0 ? amp_ * g * (r / root) : 0.0;
    }

    //! a and the radial drift coefficient in one pass; r must be > 0
    Values evaluate(double r) const
    {
        if (r > radius_)
        {
            return {0, 0};
        }
        double const root = std::pow(r, inv_pm1_);
        double g = c1_ - tau_ * r * root;
        if (g < 0)
        {
            g = 0;
        }
        double const a = r < radius_ ? amp_ * g * (r / root) : 0.0;
        double const B = amp_ * (alpha_ * g / (r * root) - inward_);
        return {a, B};
    }

  private:
    double s_{};
    double radius_{};
    double c1_{};
    double inv_pm1_{};
    double alpha_{};
    double amp_{};
    double tau_{};
    double inward_{};
};

//---------------------------------------------------------------------------//
/*!
 * Evaluator bundle for a fixed center and time offset. The diffusion
 * convention is sigma = sqrt(2 a) against a standard Wiener process.
 */
class CoefficientField
{
  public:
    CoefficientField(BarenblattParams params, Point center, double delta);

    BarenblattParams const& params() const { return params_; }
    Point const& center() const { return center_; }
    double delta() const { return delta_; }

    double density(double t, std::span<double const> x) const;
    Point gradient(double t, std::span<double const> x) const;
    double diffusion(double t, std::span<double const> x) const;
    Point drift(double t, std::span<double const> x) const;
    //! sqrt(2 a)
    double sigma(double t, std::span<double const> x) const;

  private:
    BarenblattParams params_;
    Point center_;
    double delta_;
};

//---------------------------------------------------------------------------//
struct ExponentCheck
{
    std::string name;
    std::string inequality;
    double lhs{};
    bool holds{};
};

// Time-integrability exponent inequalities for the coefficient bounds
std::vector<ExponentCheck> check_exponents(BarenblattParams const& params);

//---------------------------------------------------------------------------//
}  // namespace pbm
