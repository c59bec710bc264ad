// SPDX-License-Identifier: Apache-2.0
//! \file radial_cdf.cpp
#include "pbm/radial_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbm/quadrature.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
RadialCdf::RadialCdf(BarenblattParams const& params,
                     double s,
                     std::size_t resolution)
    : s_(s)
{
    if (!(s > 0))
    {
        throw std::invalid_argument("RadialCdf: time must be positive");
    }
    if (resolution < 2)
    {
        throw std::invalid_argument("RadialCdf: resolution must be >= 2");
    }
    double const radius = support_radius(params, s);
    double const area = unit_sphere_area(params.d);
    auto pdf = [&](double r) {
        return area * std::pow(r, params.d - 1) * density_radial(params, s, r);
    };

    std::size_t const m = resolution;
    nodes_.resize(m + 1);
    values_.resize(m + 1);
    slopes_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i)
    {
        nodes_[i] = radius * static_cast<double>(i) / static_cast<double>(m);
    }
    nodes_[m] = radius;

    values_[0] = 0;
    for (std::size_t i = 0; i < m; ++i)
    {
        QuadResult piece = integrate(pdf, nodes_[i], nodes_[i + 1], 1e-15);
        values_[i + 1] = values_[i] + piece.value;
        slopes_[i] = pdf(nodes_[i]);
    }
    slopes_[m] = 0;
    raw_total_ = values_[m];
    if (std::fabs(raw_total_ - 1) > 1e-9)
    {
        throw std::runtime_error("RadialCdf: tabulated mass deviates from 1");
    }
    for (std::size_t i = 0; i <= m; ++i)
    {
        values_[i] /= raw_total_;
        slopes_[i] /= raw_total_;
    }
    values_[m] = 1;

    // Fritsch-Carlson limiter
    for (std::size_t i = 0; i < m; ++i)
    {
        double const h = nodes_[i + 1] - nodes_[i];
        double const secant = (values_[i + 1] - values_[i]) / h;
        if (!(values_[i + 1] >= values_[i]))
        {
            throw std::runtime_error("RadialCdf: table is not monotone");
        }
        if (secant == 0)
        {
            slopes_[i] = slopes_[i + 1] = 0;
            continue;
        }
        double const alpha = slopes_[i] / secant;
        double const beta = slopes_[i + 1] / secant;
        double const norm = alpha * alpha + beta * beta;
        if (norm > 9)
        {
            double const tau = 3 / std::sqrt(norm);
            slopes_[i] = tau * alpha * secant;
            slopes_[i + 1] = tau * beta * secant;
        }
    }
}

//---------------------------------------------------------------------------//
double RadialCdf::hermite(std::size_t i, double r) const
{
    double const h = nodes_[i + 1] - nodes_[i];
    double const t = (r - nodes_[i]) / h;
    double const t2 = t * t;
    double const t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * values_[i] + (t3 - 2 * t2 + t) * h * slopes_[i]
           + (-2 * t3 + 3 * t2) * values_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
}

double RadialCdf::hermite_slope(std::size_t i, double r) const
{
    double const h = nodes_[i + 1] - nodes_[i];
    double const t = (r - nodes_[i]) / h;
    double const t2 = t * t;
    return (6 * t2 - 6 * t) / h * values_[i] + (3 * t2 - 4 * t + 1) * slopes_[i]
           + (-6 * t2 + 6 * t) / h * values_[i + 1] + (3 * t2 - 2 * t) * slopes_[i + 1];
}

double RadialCdf::operator()(double r) const
{
    if (!(r > 0))
    {
        return 0;
    }
    if (r >= nodes_.back())
    {
        return 1;
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::clamp(hermite(i, r), values_[i], values_[i + 1]);
}

//---------------------------------------------------------------------------//
double RadialCdf::inverse(double u) const
{
    if (!(u >= 0 && u <= 1))
    {
        throw std::invalid_argument("RadialCdf::inverse: u outside [0, 1]");
    }
    if (u == 0)
    {
        return 0;
    }
    if (u == 1)
    {
        return nodes_.back();
    }
    auto it = std::upper_bound(values_.begin(), values_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - values_.begin()) - 1;
    i = std::min(i, nodes_.size() - 2);
    double lo = nodes_[i];
    double hi = nodes_[i + 1];
    double r = lo + (hi - lo) * (u - values_[i]) / (values_[i + 1] - values_[i]);
    // Safeguarded Newton on the monotone cubic
    for (int iter = 0; iter < 100; ++iter)
    {
        double const f = hermite(i, r) - u;
        if (f > 0)
        {
            hi = r;
        }
        else
        {
            lo = r;
        }
        if (hi - lo <= 1e-15 * nodes_.back())
        {
            break;
        }
        double const slope = hermite_slope(i, r);
        double next = slope > 0 ? r - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
        {
            next = 0.5 * (lo + hi);
        }
        if (std::fabs(next - r) <= 1e-16 * nodes_.back())
        {
            r = next;
            break;
        }
        r = next;
    }
    return r;
}

//---------------------------------------------------------------------------//
void sample_sphere(RngStream& rng, std::span<double> out)
{
    if (out.size() == 1)
    {
        out[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return;
    }
    double norm = 0;
    do
    {
        rng.normals(out);
        norm = 0;
        for (double v : out)
        {
            norm += v * v;
        }
    } while (!(norm > 0));
    norm = std::sqrt(norm);
    for (double& v : out)
    {
        v /= norm;
    }
}

void sample_barenblatt_point(RadialCdf const& cdf,
                             std::span<double const> y,
                             RngStream& rng,
                             std::span<double> out)
{
    double const r = cdf.inverse(rng.uniform());
    sample_sphere(rng, out);
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i] = y[i] + r * out[i];
    }
}

std::vector<Point> sample_barenblatt(BarenblattParams const& params,
                                     std::span<double const> y,
                                     double s,
                                     std::size_t n,
                                     RngStream& rng)
{
    if (!(s > 0))
    {
        throw std::invalid_argument("sample_barenblatt: time must be positive");
    }
    if (n < 1)
    {
        throw std::invalid_argument("sample_barenblatt: n must be >= 1");
    }
    if (y.size() != static_cast<std::size_t>(params.d))
    {
        throw std::invalid_argument("sample_barenblatt: center dimension != d");
    }
    RadialCdf cdf(params, s);
    std::vector<Point> out(n, Point(params.d));
    for (auto& x : out)
    {
        sample_barenblatt_point(cdf, y, rng, x);
    }
    return out;
}

//---------------------------------------------------------------------------//
}  // namespace pbm
