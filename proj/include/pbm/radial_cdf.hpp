// SPDX-License-Identifier: Apache-2.0
//! \file pbm/radial_cdf.hpp
//! Tabulated radial mass of the Barenblatt profile and exact sampling.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "barenblatt.hpp"
#include "rng.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
/*!
 * Monotone piecewise-cubic CDF of |X - y| for X ~ w(s, x) dx.
 *
 * Nodes are uniform on [0, R(s)]. Node values come from adaptive quadrature of
 * sigma_d r^{d-1} w(s, r) per interval; node slopes are the exact density,
 * limited (Fritsch-Carlson) so the Hermite interpolant is nondecreasing.
 */
class RadialCdf
{
  public:
    static constexpr std::size_t default_resolution = 4096;

    RadialCdf(BarenblattParams const& params,
              double s,
              std::size_t resolution = default_resolution);

    double time() const { return s_; }
    double radius() const { return nodes_.back(); }
    //! Total mass before renormalization
    double raw_total() const { return raw_total_; }

    std::span<double const> nodes() const { return nodes_; }
    std::span<double const> values() const { return values_; }

    double operator()(double r) const;
    //! Smallest r with F(r) = u, for u in [0, 1]
    double inverse(double u) const;

  private:
    double s_;
    double raw_total_;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> slopes_;

    double hermite(std::size_t i, double r) const;
    double hermite_slope(std::size_t i, double r) const;
};

//---------------------------------------------------------------------------//
// Uniform direction on the unit sphere S^{d-1} (Gaussian normalization)
void sample_sphere(RngStream& rng, std::span<double> out);

// One draw from w^y(s, x)dx using a prebuilt table
void sample_barenblatt_point(RadialCdf const& cdf,
                             std::span<double const> y,
                             RngStream& rng,
                             std::span<double> out);

// n i.i.d. draws from w^y(s, x)dx
std::vector<Point> sample_barenblatt(BarenblattParams const& params,
                                     std::span<double const> y,
                                     double s,
                                     std::size_t n,
                                     RngStream& rng);

//---------------------------------------------------------------------------//
}  // namespace pbm
