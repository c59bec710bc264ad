// SPDX-License-Identifier: Apache-2.0
#include "pbm/barenblatt.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pbm/params.hpp"

namespace pbm
{
namespace test
{
namespace
{
BarenblattParams const& ref()
{
    static BarenblattParams const params = derive_params(2, 4.0);
    return params;
}

Point at_radius(double r, double angle = 0.7)
{
    return {r * std::cos(angle), r * std::sin(angle)};
}
}  // namespace

//---------------------------------------------------------------------------//
TEST(DeriveParams, reference_constants)
{
    auto const& P = ref();
    EXPECT_DOUBLE_EQ(0.25, P.k);
    EXPECT_NEAR(0.25, P.q, 1e-15);
    // Frozen from the Beta reduction: (4 / (3 pi^2))^{1/3}
    EXPECT_NEAR(0.51311297541216878, P.C1, 1e-10);
    EXPECT_NEAR(std::cbrt(4 / (3 * std::numbers::pi * std::numbers::pi)), P.C1, 1e-9);
    EXPECT_DOUBLE_EQ(std::pow(P.C1 / P.q, 0.75), P.beta);
    EXPECT_TRUE(P.markov_admissible);
}

TEST(DeriveParams, matches_beta_oracle)
{
    for (auto [d, p] : {std::pair{2, 4.0}, {3, 4.0}, {2, 3.5}, {1, 3.0}, {3, 2.1}})
    {
        auto const P = derive_params(d, p);
        EXPECT_NEAR(oracle::c1_beta(d, p), P.C1, 1e-9 * P.C1) << d << " " << p;
        EXPECT_GT(P.k, 0);
        EXPECT_GT(P.q, 0);
    }
}

TEST(DeriveParams, bisection_quadrature_oracle)
{
    // Independent route: Simpson mass + plain bisection
    int const d = 2;
    double const p = 4;
    double const q = oracle::q_constant(d, p);
    auto mass = [&](double c) {
        double const R = std::pow(c / q, 0.75);
        return oracle::sphere_area(d)
               * oracle::simpson(
                   [&](double r) {
                       double g = c - q * std::pow(r, 4.0 / 3);
                       return g > 0 ? std::pow(g, 1.5) * r : 0.0;
                   },
                   0, R, 20000);
    };
    double const c = oracle::bisect([&](double c) { return mass(c) - 1; }, 0.1, 2, 1e-12);
    EXPECT_NEAR(c, ref().C1, 1e-8);
}

TEST(DeriveParams, admissibility_flag)
{
    EXPECT_FALSE(derive_params(2, 2.5).markov_admissible);
    EXPECT_FALSE(derive_params(2, 3.0).markov_admissible);
    EXPECT_TRUE(derive_params(2, 3.01).markov_admissible);
    EXPECT_FALSE(derive_params(1, 6.0).markov_admissible);
    EXPECT_TRUE(derive_params(3, 2.7).markov_admissible);
}

TEST(DeriveParams, rejects_invalid)
{
    EXPECT_THROW(derive_params(2, 2.0), std::invalid_argument);
    EXPECT_THROW(derive_params(2, 1.5), std::invalid_argument);
    EXPECT_THROW(derive_params(2, 2.0005), std::invalid_argument);
    EXPECT_THROW(derive_params(0, 4.0), std::invalid_argument);
    EXPECT_THROW(derive_params(2, std::nan("")), std::invalid_argument);
}

TEST(DeriveParams, json_serialization)
{
    std::string const json = to_json_string(ref());
    EXPECT_EQ(0u, json.find("{\"d\":2,\"p\":4,\"k\":0.25,"));
    EXPECT_NE(std::string::npos, json.find("\"markov_admissible\":true}"));
    EXPECT_NE(std::string::npos, json.find("\"C1\":0.51311297541216"));
}

//---------------------------------------------------------------------------//
TEST(Density, center_and_outside)
{
    auto const& P = ref();
    Point const y{0.3, -1.2};
    EXPECT_NEAR(0.36755259694786137, density(P, y, 1.0, y), 1e-10);
    EXPECT_NEAR(std::pow(P.C1, 1.5), density(P, y, 1.0, y), 1e-15);
    double const R = support_radius(P, 1.0);
    Point x{y[0] + 2 * R, y[1]};
    EXPECT_EQ(0.0, density(P, y, 1.0, x));
    EXPECT_THROW(density(P, y, 0.0, y), std::invalid_argument);
    EXPECT_THROW(density(P, y, -1.0, y), std::invalid_argument);
}

TEST(Density, unit_mass_at_several_times)
{
    for (int d : {1, 2, 3})
    {
        auto const P = derive_params(d, 4.0);
        for (double t : {0.5, 1.0, 2.0})
        {
            double const R = support_radius(P, t);
            double mass = oracle::sphere_area(d)
                          * oracle::simpson(
                              [&](double r) {
                                  return oracle::density(d, 4.0, P.C1, t, r)
                                         * std::pow(r, d - 1);
                              },
                              0, R, 200000);
            EXPECT_NEAR(1.0, mass, 1e-8) << "d=" << d << " t=" << t;
        }
    }
}

TEST(Density, exact_support)
{
    auto const& P = ref();
    for (double t : {0.05, 0.5, 1.0, 3.0})
    {
        double const R = support_radius(P, t);
        for (double f : {1.0, 1.0 + 1e-12, 1.5, 10.0})
        {
            EXPECT_EQ(0.0, density_radial(P, t, R * f));
            EXPECT_EQ(0.0, diffusion_radial(P, t, R * f));
        }
        EXPECT_GT(density_radial(P, t, R * (1 - 1e-6)), 0.0);
    }
}

TEST(Density, self_similarity)
{
    auto const& P = ref();
    for (double lambda : {0.5, 2.0})
    {
        for (double t : {0.3, 1.0})
        {
            double const R = support_radius(P, t);
            EXPECT_NEAR(std::pow(lambda, P.k / P.d) * R, support_radius(P, lambda * t),
                        1e-13 * R);
            for (double f : {0.0, 0.2, 0.6, 0.95})
            {
                double const r = f * R;
                double const lhs = density_radial(P, lambda * t, std::pow(lambda, P.k / P.d) * r)
                                   * std::pow(lambda, P.k);
                EXPECT_NEAR(density_radial(P, t, r), lhs, 1e-13);
            }
        }
    }
}

TEST(Density, translation_covariance)
{
    auto const& P = ref();
    Point const y{1.25, -0.75};
    Point const zero{0, 0};
    for (double r : {0.1, 0.5, 1.0, 1.6})
    {
        Point off = at_radius(r);
        Point x{off[0] + y[0], off[1] + y[1]};
        EXPECT_NEAR(density(P, zero, 1.0, off), density(P, y, 1.0, x), 1e-14);
        EXPECT_NEAR(diffusion_a(P, zero, 0.1, 1.0, off), diffusion_a(P, y, 0.1, 1.0, x),
                    1e-14);
        auto g0 = gradient(P, zero, 1.0, off);
        auto gy = gradient(P, y, 1.0, x);
        auto b0 = drift_b(P, zero, 0.1, 1.0, off);
        auto by = drift_b(P, y, 0.1, 1.0, x);
        for (int i = 0; i < 2; ++i)
        {
            EXPECT_NEAR(g0[i], gy[i], 1e-13 * (1 + std::fabs(g0[i])));
            EXPECT_NEAR(b0[i], by[i], 1e-13 * (1 + std::fabs(b0[i])));
        }
    }
}

//---------------------------------------------------------------------------//
TEST(SupportRadius, closed_forms)
{
    auto const& P = ref();
    EXPECT_NEAR(1.7147655162099834, support_radius(P, 1.0), 1e-10);
    for (double t : {1e-3, 0.05, 0.7, 1.0, 5.0, 100.0})
    {
        double const R = support_radius(P, t);
        EXPECT_NEAR(R, support_radius_direct(P, t), 1e-12 * R);
    }
    EXPECT_NEAR(std::pow(4.0 / 0.3, P.k / P.d),
                support_radius(P, 4.0) / support_radius(P, 0.3), 1e-13);
    EXPECT_THROW(support_radius(P, 0.0), std::invalid_argument);
}

//---------------------------------------------------------------------------//
TEST(Gradient, finite_difference_oracle)
{
    auto const& P = ref();
    double const R = support_radius(P, 1.0);
    double const r = R / 2;
    double const fd = oracle::central_difference(
        [&](double rr) { return oracle::density(2, 4.0, P.C1, 1.0, rr); }, r, 1e-5);
    // grad w = G (x - y), radial derivative = G r
    double const closed = gradient_coefficient(P, 1.0, r) * r;
    EXPECT_NEAR(fd, closed, 1e-6 * std::fabs(fd));
}

TEST(Gradient, anti_radial_and_support)
{
    auto const& P = ref();
    Point const y{0, 0};
    double const R = support_radius(P, 1.0);
    for (double f : {0.01, 0.3, 0.9, 0.999})
    {
        Point x = at_radius(f * R, 2.1);
        auto g = gradient(P, y, 1.0, x);
        EXPECT_LT(g[0] * x[0] + g[1] * x[1], 0.0);
    }
    for (double f : {1.0, 1.3})
    {
        auto g = gradient(P, y, 1.0, at_radius(f * R));
        EXPECT_EQ(0.0, g[0]);
        EXPECT_EQ(0.0, g[1]);
    }
    auto g0 = gradient(P, y, 1.0, y);
    EXPECT_EQ(0.0, g0[0]);
    EXPECT_EQ(0.0, g0[1]);
}

//---------------------------------------------------------------------------//
TEST(Diffusion, power_of_gradient)
{
    auto const& P = ref();
    Point const y{0, 0};
    double const delta = 0.2;
    double const R = support_radius(P, 1.0 + delta);
    EXPECT_EQ(0.0, diffusion_a(P, y, delta, 1.0, y));
    EXPECT_EQ(0.0, diffusion_a(P, y, delta, 1.0, at_radius(R)));
    for (int i = 1; i < 50; ++i)
    {
        Point x = at_radius(R * i / 50.0, 0.1 * i);
        auto g = gradient(P, y, 1.0 + delta, x);
        double const mag = std::hypot(g[0], g[1]);
        double const expected = std::pow(mag, P.p - 2);
        EXPECT_NEAR(expected, diffusion_a(P, y, delta, 1.0, x), 1e-10 * expected);
    }
    EXPECT_THROW(diffusion_a(P, y, 0.0, 0.0, y), std::invalid_argument);
}

TEST(Diffusion, general_exponent)
{
    auto const P = derive_params(3, 3.5);
    Point const y{0, 0, 0};
    double const R = support_radius(P, 0.8);
    for (double f : {0.1, 0.5, 0.8})
    {
        Point x{f * R / std::sqrt(3.0), f * R / std::sqrt(3.0), f * R / std::sqrt(3.0)};
        auto g = gradient(P, y, 0.8, x);
        double const mag = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        double const expected = std::pow(mag, P.p - 2);
        EXPECT_NEAR(expected, diffusion_a(P, y, 0.0, 0.8, x), 1e-10 * expected);
    }
}

//---------------------------------------------------------------------------//
TEST(Drift, finite_difference_oracle)
{
    auto const& P = ref();
    double const R = support_radius(P, 1.0);
    double const r = R / 2;
    double const fd = oracle::central_difference4(
        [&](double rr) { return diffusion_radial(P, 1.0, rr); }, r, 1e-4);
    double const closed = drift_coefficient(P, 1.0, r) * r;
    EXPECT_NEAR(fd, closed, 1e-5 * std::fabs(fd));
}

TEST(Drift, support_and_boundary_direction)
{
    auto const& P = ref();
    Point const y{0.5, 0.5};
    double const delta = 0.1;
    double const R = support_radius(P, 1.0 + delta);
    Point outside{y[0] + 1.01 * R, y[1]};
    auto b = drift_b(P, y, delta, 1.0, outside);
    EXPECT_EQ(0.0, b[0]);
    EXPECT_EQ(0.0, b[1]);
    Point edge{y[0] + R, y[1]};
    auto be = drift_b(P, y, delta, 1.0, edge);
    EXPECT_LT(be[0] * R, 0.0);
    EXPECT_THROW(drift_b(P, y, delta, 1.0, y), std::domain_error);
}

TEST(Drift, bound_shape)
{
    // |b| <= C (r^{-1/(p-1)} + s^{-kp/(d(p-1))} r) on the support
    auto const& P = ref();
    for (double s : {0.05, 0.5, 2.0})
    {
        double const R = support_radius(P, s);
        double const amp = std::pow(P.q * P.p / (P.p - 2), P.p - 2)
                           * std::pow(s, P.diffusion_time_exponent());
        double const C = amp * std::max((P.p - 2) / (P.p - 1) * P.C1, P.q * P.p / (P.p - 1));
        for (int i = 1; i <= 100; ++i)
        {
            double const r = R * i / 100.0;
            double const mag = std::fabs(drift_coefficient(P, s, r)) * r;
            double const bound = C
                                 * (std::pow(r, -1 / (P.p - 1))
                                    + std::pow(s, -P.radius_time_exponent()) * r);
            EXPECT_LE(mag, bound * (1 + 1e-12));
        }
    }
}

TEST(CoefficientSlice, matches_free_functions)
{
    auto const P = derive_params(2, 3.5);
    double const s = 0.37;
    CoefficientSlice slice(P, s);
    double const R = support_radius(P, s);
    EXPECT_DOUBLE_EQ(R, slice.radius());
    for (int i = 1; i <= 40; ++i)
    {
        double const r = R * i / 40.0;
        auto v = slice.evaluate(r);
        double const a = diffusion_radial(P, s, r);
        double const B = drift_coefficient(P, s, r);
        EXPECT_NEAR(a, v.a, 1e-13 * (1 + a));
        EXPECT_NEAR(B, v.B, 1e-12 * (1 + std::fabs(B)));
        EXPECT_NEAR(a, slice.diffusion(r), 1e-13 * (1 + a));
    }
    auto v = slice.evaluate(1.5 * R);
    EXPECT_EQ(0.0, v.a);
    EXPECT_EQ(0.0, v.B);
}

TEST(CoefficientField, sigma_convention)
{
    CoefficientField field(ref(), {0, 0}, 0.2);
    Point x{0.4, 0.3};
    EXPECT_DOUBLE_EQ(std::sqrt(2 * field.diffusion(0.8, x)), field.sigma(0.8, x));
    EXPECT_DOUBLE_EQ(density(ref(), Point{0, 0}, 1.0, x), field.density(0.8, x));
    EXPECT_THROW(CoefficientField(ref(), {0, 0}, -0.1), std::invalid_argument);
}

//---------------------------------------------------------------------------//
TEST(AnalyticCdf, matches_quadrature)
{
    auto const& P = ref();
    double const s = 1.0;
    double const R = support_radius(P, s);
    for (double f : {0.1, 0.4, 0.77, 1.0})
    {
        double const mass = oracle::sphere_area(2)
                            * oracle::simpson(
                                [&](double r) { return oracle::density(2, 4.0, P.C1, s, r) * r; },
                                0, f * R, 100000);
        EXPECT_NEAR(mass, analytic_radial_cdf(P, s, f * R), 1e-9);
    }
}

//---------------------------------------------------------------------------//
TEST(Exponents, reference_points)
{
    for (auto [d, p] : {std::pair{2, 4.0}, {3, 2.1}, {1, 3.0}})
    {
        auto checks = check_exponents(derive_params(d, p));
        ASSERT_EQ(4u, checks.size());
        for (auto const& c : checks)
        {
            EXPECT_TRUE(c.holds) << c.name << " d=" << d << " p=" << p;
            EXPECT_GT(c.lhs, -1);
        }
    }
}

TEST(Exponents, reference_values)
{
    // d=2, p=4: k = 1/4, base = -(1/4)(2)(1 + 4/6) = -5/6
    auto checks = check_exponents(ref());
    EXPECT_NEAR(-5.0 / 6, checks[0].lhs, 1e-15);
    EXPECT_NEAR(-5.0 / 6 + 1.0 / 8 * 2.0 / 3, checks[1].lhs, 1e-15);
    EXPECT_NEAR(-5.0 / 6 - 1.0 / 6 + 1.0 / 8, checks[2].lhs, 1e-15);
    EXPECT_NEAR(-5.0 / 6 + 0.25 * 5.0 / 6 - 0.25, checks[3].lhs, 1e-15);
}

TEST(Exponents, sample_grid)
{
    for (int d = 1; d <= 5; ++d)
    {
        for (int j = 1; j <= 80; ++j)
        {
            double const p = 2 + 4.0 * j / 80;
            for (auto const& c : check_exponents(derive_params(d, p)))
            {
                EXPECT_TRUE(c.holds) << c.name << " d=" << d << " p=" << p;
            }
        }
    }
}

//---------------------------------------------------------------------------//
}  // namespace test
}  // namespace pbm
