// SPDX-License-Identifier: Apache-2.0
//! \file pbm/quadrature.hpp
//! Adaptive 1-D quadrature with endpoint grading, and bracketing roots.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace pbm
{
//---------------------------------------------------------------------------//
using ScalarFn = std::function<double(double)>;

struct QuadResult
{
    double value{};
    double error{};  //!< Achieved absolute error estimate
    bool converged{};
};

//! Which endpoints of the interval receive geometric refinement
enum class Grading
{
    none,
    left,
    right,
    both
};

//! Thrown when a caller requires convergence and the quadrature failed
class QuadratureError : public std::runtime_error
{
  public:
    QuadratureError(std::string const& what, double achieved)
        : std::runtime_error(what + " (achieved error bound "
                             + std::to_string(achieved) + ")")
        , achieved_(achieved)
    {
    }
    double achieved() const { return achieved_; }

  private:
    double achieved_;
};

//---------------------------------------------------------------------------//
// Globally adaptive Gauss-Kronrod on [a, b] with absolute tolerance
QuadResult integrate(ScalarFn const& f, double a, double b, double tol);

// Adaptive quadrature with geometric refinement (ratio 1/2, depth <= 60)
// toward the graded endpoint(s); handles r^{-alpha} singularities, alpha < 1
QuadResult integrate_radial(ScalarFn const& f,
                            double a,
                            double b,
                            double tol,
                            Grading grading = Grading::left);

// As integrate_radial but throws QuadratureError on non-convergence
double integrate_or_throw(ScalarFn const& f,
                          double a,
                          double b,
                          double tol,
                          Grading grading = Grading::left);

// Bracketing root: |g(r)| <= tol or final bracket width <= tol
double find_root(ScalarFn const& g, double lo, double hi, double tol);

//---------------------------------------------------------------------------//
}  // namespace pbm
