// SPDX-License-Identifier: Apache-2.0
//! \file params.cpp
#include "pbm/params.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pbm/quadrature.hpp"

namespace pbm
{
namespace
{
void validate(int d, double p)
{
    if (d < 1)
    {
        throw std::invalid_argument("dimension d must be >= 1, got "
                                    + std::to_string(d));
    }
    if (!std::isfinite(p) || !(p > 2))
    {
        throw std::invalid_argument(
            "exponent p must satisfy p > 2 (the profile power (p-1)/(p-2) is "
            "undefined at p = 2), got p = "
            + format_double(p));
    }
    if (p < min_exponent)
    {
        throw std::invalid_argument(
            "exponent p is too close to 2 (p >= 2.001 required), got p = "
            + format_double(p));
    }
}

double kappa(int d, double p)
{
    return 1.0 / (p - 2 + p / d);
}

double q_constant(int d, double p)
{
    return (p - 2) / p * std::pow(kappa(d, p) / d, 1 / (p - 1));
}
}  // namespace

//---------------------------------------------------------------------------//
double unit_sphere_area(int d)
{
    return 2 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

//---------------------------------------------------------------------------//
double profile_mass(int d, double p, double q, double c)
{
    if (!(c > 0))
    {
        return 0;
    }
    double const m = p / (p - 1);
    double const n = (p - 1) / (p - 2);
    double const radius = std::pow(c / q, 1 / m);
    auto integrand = [&](double r) {
        double g = c - q * std::pow(r, m);
        return g > 0 ? std::pow(g, n) * std::pow(r, d - 1) : 0.0;
    };
    double const scale = std::pow(c, n) * std::pow(radius, d);
    QuadResult res
        = integrate_radial(integrand, 0, radius, 1e-13 * scale, Grading::right);
    return unit_sphere_area(d) * res.value;
}

//---------------------------------------------------------------------------//
BarenblattParams derive_params(int d, double p)
{
    validate(d, p);
    BarenblattParams result;
    result.d = d;
    result.p = p;
    result.k = kappa(d, p);
    result.q = q_constant(d, p);

    auto excess = [&](double c) { return profile_mass(d, p, result.q, c) - 1; };
    double lo = 0.5;
    double hi = 1.0;
    while (excess(lo) > 0)
    {
        hi = lo;
        lo *= 0.5;
    }
    while (excess(hi) < 0)
    {
        lo = hi;
        hi *= 2;
    }
    result.C1 = find_root(excess, lo, hi, 1e-15);
    if (std::fabs(excess(result.C1)) > 1e-9)
    {
        throw std::runtime_error("normalization constant did not converge");
    }
    result.beta = std::pow(result.C1 / result.q, (p - 1) / p);
    result.markov_admissible = d >= 2 && p > 2 * (1 + 1.0 / d);
    return result;
}

//---------------------------------------------------------------------------//
std::string format_double(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(
        buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    if (ec != std::errc{})
    {
        return "nan";
    }
    return std::string(buf, end);
}

//---------------------------------------------------------------------------//
std::string to_json_string(BarenblattParams const& params)
{
    std::ostringstream os;
    os << "{\"d\":" << params.d << ",\"p\":" << format_double(params.p)
       << ",\"k\":" << format_double(params.k)
       << ",\"q\":" << format_double(params.q)
       << ",\"C1\":" << format_double(params.C1)
       << ",\"beta\":" << format_double(params.beta)
       << ",\"markov_admissible\":"
       << (params.markov_admissible ? "true" : "false") << "}";
    return os.str();
}

//---------------------------------------------------------------------------//
}  // namespace pbm
