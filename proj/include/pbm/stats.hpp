// SPDX-License-Identifier: Apache-2.0
//! \file pbm/stats.hpp
//! Kolmogorov-Smirnov statistics (one-sample, two-sample, bivariate) and
//! chi-square helpers used by the verification suites.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace pbm
{
//---------------------------------------------------------------------------//
//! Asymptotic 99% coefficient c(alpha) of the KS distribution
inline constexpr double ks_coefficient_99 = 1.63;

/*!
 * Right-continuous empirical CDF of a sample, stored as sorted values.
 */
class EmpiricalCdf
{
  public:
    explicit EmpiricalCdf(std::vector<double> values);

    std::size_t size() const { return sorted_.size(); }
    std::span<double const> sorted() const { return sorted_; }
    //! Fraction of values <= x
    double operator()(double x) const;

  private:
    std::vector<double> sorted_;
};

// sup |F_n - F| against a continuous reference CDF
double ks_statistic(EmpiricalCdf const& sample,
                    std::function<double(double)> const& cdf);

// sup |F_n - G_m| between two samples
double ks_two_sample(EmpiricalCdf const& a, EmpiricalCdf const& b);

double ks_critical_one_sample(std::size_t n, double coefficient = ks_coefficient_99);
double ks_critical_two_sample(std::size_t n,
                              std::size_t m,
                              double coefficient = ks_coefficient_99);

//---------------------------------------------------------------------------//
using Pair = std::pair<double, double>;

// Two-sample bivariate KS (Fasano-Franceschini style): the maximum over the
// four quadrant orientations, evaluated at every pooled point, of the
// difference in empirical quadrant probabilities. O((n+m) log(n+m)).
double ks2d_two_sample(std::span<Pair const> a, std::span<Pair const> b);

// Pearson chi-square statistic for observed counts against equal expected
double chi_square_uniform(std::span<std::size_t const> counts);

// Upper quantile of chi-square with k degrees of freedom
double chi_square_quantile(double probability, std::size_t dof);

//---------------------------------------------------------------------------//
}  // namespace pbm
