// SPDX-License-Identifier: Apache-2.0
//! \file pbm/params.hpp
//! Parameter arithmetic for the Barenblatt family of the parabolic p-Laplace
//! equation.
#pragma once

#include <string>

namespace pbm
{
//---------------------------------------------------------------------------//
//! Smallest accepted p. Below this (p-1)/(p-2) overflows in practice.
inline constexpr double min_exponent = 2.0 + 1e-3;

//---------------------------------------------------------------------------//
/*!
 * Dimension, exponent and derived constants of the fundamental solution
 *
 *   w(t,x) = t^{-k} (C1 - q t^{-kp/(d(p-1))} |x-y|^{p/(p-1)})_+^{(p-1)/(p-2)}.
 *
 * \c C1 is fixed by unit mass; \c beta is the support radius at t = 1, so that
 * R(t) = beta t^{k/d}.
 */
struct BarenblattParams
{
    int d{};
    double p{};
    double k{};
    double q{};
    double C1{};
    double beta{};
    bool markov_admissible{};

    //! Exponent kp/(d(p-1)) of t in the scaled radius term
    double radius_time_exponent() const { return k * p / (d * (p - 1)); }
    //! Exponent p/(p-1) of |x-y|
    double radius_power() const { return p / (p - 1); }
    //! Exponent (p-1)/(p-2) applied to the positive part
    double profile_power() const { return (p - 1) / (p - 2); }
    //! Time exponent -k(p-2)(1 + p/(d(p-1))) of the diffusion coefficient
    double diffusion_time_exponent() const
    {
        return -k * (p - 2) * (1 + p / (d * (p - 1)));
    }
};

//---------------------------------------------------------------------------//
// Surface area of the unit sphere S^{d-1} in R^d
double unit_sphere_area(int d);

// Unnormalized mass sigma_d * int_0^R (c - q r^{p/(p-1)})^{(p-1)/(p-2)} r^{d-1} dr
double profile_mass(int d, double p, double q, double c);

// Validate (d,p) and compute all constants; C1 by root finding on the mass
BarenblattParams derive_params(int d, double p);

// Serialize as {d,p,k,q,C1,beta,markov_admissible} with 17 significant digits
std::string to_json_string(BarenblattParams const& params);

// Format a double with 17 significant digits
std::string format_double(double value);

//---------------------------------------------------------------------------//
}  // namespace pbm
