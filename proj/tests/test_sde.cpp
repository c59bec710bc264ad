// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "pbm/report.hpp"
#include "pbm/sde.hpp"

namespace pbm
{
namespace test
{
namespace
{
SimConfig small_config(std::size_t paths = 2000)
{
    SimConfig c;
    c.params = derive_params(2, 4.0);
    c.center = {0.25, -0.5};
    c.t0 = 0.05;
    c.horizon = 0.25;
    c.step = 1e-3;
    c.paths = paths;
    c.seed = 17;
    c.workers = 1;
    c.snapshot_times = {0.15};
    return c;
}
}  // namespace

//---------------------------------------------------------------------------//
TEST(SimConfig, validation)
{
    auto c = small_config();
    EXPECT_NO_THROW(c.validate());
    auto bad = c;
    bad.t0 = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.horizon = 0.2505;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.noise_step = 3e-4;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.center = {0};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.snapshot_times = {0.9};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = c;
    bad.step = -1;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    EXPECT_EQ(200, c.step_index(0.25));
}

TEST(Simulate, zero_steps_is_initial_sample)
{
    auto c = small_config(500);
    c.horizon = c.t0;
    c.snapshot_times.clear();
    auto e = simulate(c);
    ASSERT_EQ(1u, e.times.size());
    auto longer = small_config(500);
    auto f = simulate(longer);
    EXPECT_EQ(e.positions[0], f.positions[0]);
}

TEST(Simulate, outside_support_frozen)
{
    auto c = small_config();
    double const R = support_radius(c.params, c.horizon);
    std::vector<double> pos{c.center[0] + 1.2 * R, c.center[1],
                            c.center[0], c.center[1] - 3 * R};
    auto e = simulate_from(c, c.t0, pos, {0, 1});
    EXPECT_EQ(pos, e.positions.back());
    // Restarting from the frozen snapshot also leaves it in place
    auto r = restart(e, 1, c.horizon);
    EXPECT_EQ(pos, r.positions.back());
}

TEST(Simulate, center_point_does_not_move)
{
    auto c = small_config();
    std::vector<double> pos{c.center[0], c.center[1]};
    auto e = simulate_from(c, c.t0, pos, {0});
    EXPECT_EQ(pos, e.positions.back());
}

TEST(Simulate, deterministic_across_workers)
{
    auto c = small_config(777);
    auto one = simulate(c);
    c.workers = 4;
    auto four = simulate(c);
    c.workers = 3;
    auto three = simulate(c);
    EXPECT_EQ(one.positions, four.positions);
    EXPECT_EQ(one.positions, three.positions);
    EXPECT_EQ(one.times, four.times);
}

TEST(Simulate, stays_near_support)
{
    auto c = small_config();
    auto e = simulate(c);
    for (std::size_t k = 0; k < e.times.size(); ++k)
    {
        double const R = support_radius(c.params, e.times[k] + c.delta0);
        for (double r : e.radii(k))
        {
            ASSERT_LE(r, 1.05 * R);
        }
    }
}

TEST(Simulate, marginal_ks_small_ensemble)
{
    auto c = small_config(20000);
    auto e = simulate(c);
    auto const k = e.snapshot_index(0.25);
    auto ecdf = empirical_radial_cdf(e, k, c.center);
    double const ks = ks_statistic(
        ecdf, [&](double r) { return analytic_radial_cdf(c.params, 0.25, r); });
    EXPECT_LE(ks, ks_critical_one_sample(c.paths) + 0.005);
}

TEST(Simulate, common_noise_grid)
{
    // h with noise on the h/2 grid equals h/2 noise summed pairwise: with a
    // path started outside the support both are frozen; inside, the two step
    // sizes stay close pathwise.
    auto c = small_config(200);
    c.noise_step = 5e-4;
    auto coarse = simulate(c);
    auto fine_cfg = c;
    fine_cfg.step = 5e-4;
    auto fine = simulate(fine_cfg);
    EXPECT_EQ(coarse.positions.front(), fine.positions.front());
    double mean_gap = 0;
    auto const& a = coarse.positions.back();
    auto const& b = fine.positions.back();
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        mean_gap += std::fabs(a[i] - b[i]) / a.size();
    }
    EXPECT_LT(mean_gap, 0.05);
}

TEST(Simulate, dirac_start_time_offset)
{
    auto c = small_config(10000);
    c.delta0 = 0.2;
    c.t0 = 0;
    c.horizon = 0.2;
    c.snapshot_times.clear();
    auto e = simulate(c);
    auto ecdf = empirical_radial_cdf(e, e.times.size() - 1, c.center);
    double const ks = ks_statistic(
        ecdf, [&](double r) { return analytic_radial_cdf(c.params, 0.4, r); });
    EXPECT_LE(ks, ks_critical_one_sample(c.paths) + 0.005);
}

TEST(Simulate, literal_convention_underdiffuses)
{
    auto c = small_config(5000);
    auto standard = simulate(c);
    c.convention = DiffusionConvention::literal;
    auto literal = simulate(c);
    auto const k = standard.times.size() - 1;
    auto mean = [](std::vector<double> v) {
        double s = 0;
        for (double x : v)
        {
            s += x / v.size();
        }
        return s;
    };
    EXPECT_LT(mean(literal.radii(k)), mean(standard.radii(k)));
}

//---------------------------------------------------------------------------//
TEST(Restart, identity_and_streams)
{
    auto c = small_config(1000);
    auto e = simulate(c);
    auto const k = e.snapshot_index(0.15);
    auto ident = restart(e, k, 0.15);
    EXPECT_EQ(e.positions[k], ident.positions.back());

    auto same = restart(e, k, 0.25, RestartStreams::same);
    EXPECT_EQ(e.positions.back(), same.positions.back());

    auto fresh = restart(e, k, 0.25);
    EXPECT_NE(e.positions.back(), fresh.positions.back());
    EXPECT_EQ(c.generation + 1, fresh.config.generation);
    EXPECT_THROW(restart(e, k, 0.1), std::invalid_argument);
}

TEST(Restart, flow_property_small)
{
    auto c = small_config(20000);
    auto e = simulate(c);
    auto fresh = restart(e, e.snapshot_index(0.15), 0.25);
    EmpiricalCdf direct(e.radii(e.times.size() - 1));
    EmpiricalCdf again(fresh.radii(fresh.times.size() - 1));
    EXPECT_LE(ks_two_sample(direct, again), ks_critical_two_sample(c.paths, c.paths));
}

//---------------------------------------------------------------------------//
TEST(EmpiricalRadialCdf, examples)
{
    auto c = small_config(1);
    c.horizon = c.t0;
    c.snapshot_times.clear();
    PathEnsemble e;
    e.config = c;
    e.times = {c.t0};
    e.path_ids = {0, 1};
    e.positions = {{c.center[0] + 1, c.center[1], c.center[0], c.center[1] + 3}};
    auto ecdf = empirical_radial_cdf(e, 0, c.center);
    EXPECT_EQ(0.0, ecdf(0.99));
    EXPECT_EQ(0.5, ecdf(1.0));
    EXPECT_EQ(0.5, ecdf(2.5));
    EXPECT_EQ(1.0, ecdf(3.0));

    e.path_ids = {0};
    e.positions = {{c.center[0], c.center[1]}};
    auto at_center = empirical_radial_cdf(e, 0, c.center);
    EXPECT_EQ(1.0, at_center(0.0));
    EXPECT_EQ(0.0, at_center(-1e-300));
}

//---------------------------------------------------------------------------//
TEST(Consistency, same_streams_give_zero)
{
    auto c = small_config(3000);
    auto e = simulate(c);
    ConsistencyOptions opts;
    opts.streams = RestartStreams::same;
    auto rep = conditional_consistency_test(e, e.snapshot_index(0.15),
                                            e.snapshot_index(0.25), opts);
    ASSERT_FALSE(rep.stats.empty());
    for (auto const& s : rep.stats)
    {
        EXPECT_EQ(0.0, s.value) << s.name;
    }
    EXPECT_TRUE(rep.pass());
}

TEST(Consistency, fresh_passes_and_shift_fails)
{
    auto c = small_config(5000);
    auto e = simulate(c);
    auto const r = e.snapshot_index(0.15);
    auto const t = e.snapshot_index(0.25);
    auto rep = conditional_consistency_test(e, r, t);
    EXPECT_TRUE(rep.pass()) << to_json(rep).dump();

    ConsistencyOptions shifted;
    shifted.shifted_bin = 1;
    auto bad = conditional_consistency_test(e, r, t, shifted);
    EXPECT_FALSE(bad.pass());
    ASSERT_NE(nullptr, bad.find("bin1_ks"));
    EXPECT_FALSE(bad.find("bin1_ks")->pass());
}

TEST(Consistency, sparse_bins_flagged)
{
    auto c = small_config(300);
    auto e = simulate(c);
    ConsistencyOptions opts;
    opts.bins = 10;
    auto rep = conditional_consistency_test(e, e.snapshot_index(0.15),
                                            e.snapshot_index(0.25), opts);
    EXPECT_FALSE(rep.notes.empty());
    EXPECT_THROW(conditional_consistency_test(e, 1, 0), std::invalid_argument);
}

//---------------------------------------------------------------------------//
TEST(Report, pass_rules_and_json)
{
    VerificationReport rep;
    EXPECT_FALSE(rep.pass());
    rep.check = "demo";
    rep.add("a", 0.5, 1.0);
    rep.add("b", 2.0, 1.0, Bound::at_least);
    EXPECT_TRUE(rep.pass());
    rep.add("c", 0.0, 0.0, Bound::below);
    EXPECT_FALSE(rep.pass());
    rep.stats.pop_back();
    rep.add("e", 0.0, 0.0, Bound::above);
    EXPECT_FALSE(rep.pass());
    rep.stats.back().value = 1e-300;
    EXPECT_TRUE(rep.pass());
    rep.stats.pop_back();
    rep.add("nan", std::nan(""), 1.0);
    EXPECT_FALSE(rep.pass());
    auto j = to_json(rep);
    EXPECT_EQ("demo", j["check"]);
    EXPECT_EQ("min", j["stats"][1]["bound"]);
    EXPECT_EQ(j.dump(), to_json(rep).dump());
    EXPECT_EQ("cbf29ce484222325", digest_hex(""));
}

//---------------------------------------------------------------------------//
}  // namespace test
}  // namespace pbm
