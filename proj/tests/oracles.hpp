// SPDX-License-Identifier: Apache-2.0
//! \file tests/oracles.hpp
//! Independent reference computations for tests. Nothing here calls into the
//! library's quadrature, root finding or closed-form coefficient code.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace pbm::oracle
{
//---------------------------------------------------------------------------//
inline double sphere_area(int d)
{
    return 2 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

inline double kappa(int d, double p)
{
    return 1.0 / (p - 2 + p / d);
}

inline double q_constant(int d, double p)
{
    return (p - 2) / p * std::pow(kappa(d, p) / d, 1 / (p - 1));
}

/*!
 * C1 from the Beta reduction: with r = (c/q)^{1/m} u^{1/m} the mass is
 * sigma_d c^{n + d/m} q^{-d/m} B(d/m, n+1) / m, m = p/(p-1), n = (p-1)/(p-2).
 */
inline double c1_beta(int d, double p)
{
    double const m = p / (p - 1);
    double const n = (p - 1) / (p - 2);
    double const coeff = sphere_area(d) * std::pow(q_constant(d, p), -d / m)
                         * std::beta(d / m, n + 1) / m;
    return std::pow(1 / coeff, 1 / (n + d / m));
}

//---------------------------------------------------------------------------//
//! Composite Simpson on [a, b] with n (even) panels
inline double simpson(std::function<double(double)> const& f, double a, double b,
                      int n)
{
    double const h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
    {
        sum += f(a + i * h) * (i % 2 ? 4 : 2);
    }
    return sum * h / 3;
}

//! Plain bisection to width tol
inline double bisect(std::function<double(double)> const& g, double lo, double hi,
                     double tol)
{
    double glo = g(lo);
    while (hi - lo > tol)
    {
        double const mid = 0.5 * (lo + hi);
        double const gm = g(mid);
        if ((gm > 0) == (glo > 0))
        {
            lo = mid;
            glo = gm;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

//! Radial Barenblatt density written out directly from its definition
inline double density(int d, double p, double C1, double s, double r)
{
    double const k = kappa(d, p);
    double const g = C1
                     - q_constant(d, p) * std::pow(s, -k * p / (d * (p - 1)))
                           * std::pow(r, p / (p - 1));
    return g > 0 ? std::pow(s, -k) * std::pow(g, (p - 1) / (p - 2)) : 0.0;
}

//! Central difference of f at x with step h
inline double central_difference(std::function<double(double)> const& f,
                                 double x, double h)
{
    return (f(x + h) - f(x - h)) / (2 * h);
}

//! Fourth-order central difference
inline double central_difference4(std::function<double(double)> const& f,
                                  double x, double h)
{
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h))
           / (12 * h);
}

//---------------------------------------------------------------------------//
}  // namespace pbm::oracle
