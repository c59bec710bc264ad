// SPDX-License-Identifier: Apache-2.0
//! \file quadrature.cpp
#include "pbm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace pbm
{
namespace
{
//---------------------------------------------------------------------------//
constexpr int max_intervals = 4000;
constexpr int grading_depth = 60;
constexpr double eps = std::numeric_limits<double>::epsilon();

struct Panel
{
    double a;
    double b;
    double value;
    double error;
    bool operator<(Panel const& other) const { return error < other.error; }
};

Panel gk15(ScalarFn const& f, double a, double b)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0;
    double value = GK::integrate(f, a, b, 0, 0.0, &err);
    // With max_depth 0 the reported error is on the reference interval
    return {a, b, value, err * 0.5 * (b - a)};
}

//---------------------------------------------------------------------------//
// Pieces [a + L 2^{-(j+1)}, a + L 2^{-j}] shrinking toward `a` (or toward b
// when mirrored), followed by a geometric tail extrapolation.
QuadResult graded_toward(ScalarFn const& f, double a, double b, double tol,
                         bool toward_left)
{
    double const len = b - a;
    double sum = 0;
    double err = 0;
    bool ok = true;
    std::vector<double> pieces;
    pieces.reserve(grading_depth);
    double const piece_tol = tol / 128;
    for (int j = 0; j < grading_depth; ++j)
    {
        double const outer = len * std::ldexp(1.0, -j);
        double const inner = len * std::ldexp(1.0, -(j + 1));
        double lo = toward_left ? a + inner : b - outer;
        double hi = toward_left ? a + outer : b - inner;
        double const anchor = std::fabs(toward_left ? a : b);
        if (!(hi > lo) || inner <= 1024 * eps * anchor)
        {
            break;
        }
        QuadResult piece = integrate(f, lo, hi, piece_tol);
        ok = ok && piece.converged;
        sum += piece.value;
        err += piece.error;
        pieces.push_back(piece.value);
        std::size_t const n = pieces.size();
        if (n >= 6)
        {
            double const mag = std::fabs(pieces[n - 1]) + std::fabs(pieces[n - 2]);
            if (mag <= 1e-4 * tol)
            {
                break;
            }
        }
    }

    // Tail extrapolation from the last ratios
    std::size_t const n = pieces.size();
    double tail = 0;
    double tail_err = 0;
    if (n >= 3 && pieces[n - 1] != 0 && pieces[n - 2] != 0)
    {
        double const ratio = pieces[n - 1] / pieces[n - 2];
        double const prev_ratio = pieces[n - 2] / pieces[n - 3];
        if (ratio > 0 && ratio < 1)
        {
            tail = pieces[n - 1] * ratio / (1 - ratio);
            double alt = (prev_ratio > 0 && prev_ratio < 1)
                             ? pieces[n - 1] * prev_ratio / (1 - prev_ratio)
                             : 0.0;
            tail_err = std::fabs(tail - alt);
        }
        else
        {
            // Non-geometric or growing tail: cannot certify the remainder
            tail_err = std::fabs(pieces[n - 1]) * grading_depth;
        }
    }
    else if (n >= 1)
    {
        tail_err = std::fabs(pieces[n - 1]);
    }
    err += tail_err;
    return {sum + tail, err, ok && err <= tol};
}

//---------------------------------------------------------------------------//
}  // namespace

//---------------------------------------------------------------------------//
QuadResult integrate(ScalarFn const& f, double a, double b, double tol)
{
    if (!(a <= b))
    {
        throw std::invalid_argument("integrate: require a <= b");
    }
    if (a == b)
    {
        return {0.0, 0.0, true};
    }
    std::priority_queue<Panel> panels;
    Panel first = gk15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    int count = 1;
    while (total_err > tol && count < max_intervals)
    {
        Panel worst = panels.top();
        double const mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            break;  // interval exhausted at machine resolution
        }
        panels.pop();
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    // Recompute sums to shed accumulated cancellation
    total = 0;
    total_err = 0;
    while (!panels.empty())
    {
        total += panels.top().value;
        total_err += panels.top().error;
        panels.pop();
    }
    return {total, total_err, total_err <= tol};
}

//---------------------------------------------------------------------------//
QuadResult integrate_radial(ScalarFn const& f, double a, double b, double tol,
                            Grading grading)
{
    if (!(a <= b))
    {
        throw std::invalid_argument("integrate_radial: require a <= b");
    }
    if (a == b)
    {
        return {0.0, 0.0, true};
    }
    switch (grading)
    {
        case Grading::none:
            return integrate(f, a, b, tol);
        case Grading::left:
            return graded_toward(f, a, b, tol, true);
        case Grading::right:
            return graded_toward(f, a, b, tol, false);
        case Grading::both: {
            double const mid = 0.5 * (a + b);
            QuadResult lo = graded_toward(f, a, mid, 0.5 * tol, true);
            QuadResult hi = graded_toward(f, mid, b, 0.5 * tol, false);
            return {lo.value + hi.value,
                    lo.error + hi.error,
                    lo.converged && hi.converged};
        }
    }
    return {};
}

//---------------------------------------------------------------------------//
double integrate_or_throw(ScalarFn const& f, double a, double b, double tol,
                          Grading grading)
{
    QuadResult r = integrate_radial(f, a, b, tol, grading);
    if (!r.converged)
    {
        throw QuadratureError("quadrature did not converge", r.error);
    }
    return r.value;
}

//---------------------------------------------------------------------------//
double find_root(ScalarFn const& g, double lo, double hi, double tol)
{
    if (!(lo <= hi) || !(tol > 0))
    {
        throw std::invalid_argument("find_root: invalid bracket or tolerance");
    }
    double const glo = g(lo);
    double const ghi = g(hi);
    if (!std::isfinite(glo) || !std::isfinite(ghi) || glo * ghi > 0)
    {
        throw std::invalid_argument(
            "find_root: g(lo) and g(hi) must bracket a root");
    }
    if (std::fabs(glo) <= tol)
    {
        return lo;
    }
    if (std::fabs(ghi) <= tol)
    {
        return hi;
    }
    std::uintmax_t max_iter = 200;
    auto const done = [tol](double a, double b) { return std::fabs(b - a) <= tol; };
    auto [a, b] = boost::math::tools::toms748_solve(
        [&g](double x) { return g(x); }, lo, hi, glo, ghi, done, max_iter);
    return 0.5 * (a + b);
}

//---------------------------------------------------------------------------//
}  // namespace pbm
