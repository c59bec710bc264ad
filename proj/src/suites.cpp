// SPDX-License-Identifier: Apache-2.0
//! \file suites.cpp
#include "pbm/suites.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pbm/io.hpp"
#include "pbm/params.hpp"
#include "pbm/verify.hpp"

namespace pbm
{
namespace
{
using nlohmann::json;

std::vector<std::string> const ensemble_suites{"marginals", "support", "flow", "markov",
                                               "translation"};

bool contains(std::vector<std::string> const& v, std::string const& s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

template<class T>
json optional_json(std::optional<T> const& v)
{
    return v ? json(*v) : json(nullptr);
}

template<class T>
std::optional<T> optional_from(json const& j, char const* key)
{
    if (!j.contains(key) || j.at(key).is_null())
    {
        return std::nullopt;
    }
    return j.at(key).get<T>();
}

std::string tag_time(double t)
{
    return format_double(t);
}

double snap_to_grid(double t0, double h, double t)
{
    return t0 + std::round((t - t0) / h) * h;
}

std::vector<double> default_pde_snapshots(double T)
{
    return {0.25 * T, 0.5 * T, 0.75 * T};
}

//---------------------------------------------------------------------------//
//! Shared state of one suite invocation: memoized ensembles
class Context
{
  public:
    Context(RunConfig const& config, unsigned workers)
        : config_(config), workers_(workers)
    {
    }

    RunConfig const& config() const { return config_; }
    unsigned workers() const { return workers_; }

    std::shared_ptr<PathEnsemble const> ensemble(SimConfig const& c)
    {
        std::string const key = ensemble_sidecar(c).dump();
        auto it = cache_.find(key);
        if (it == cache_.end())
        {
            it = cache_.emplace(key, std::make_shared<PathEnsemble const>(simulate(c))).first;
        }
        return it->second;
    }

  private:
    RunConfig const& config_;
    unsigned workers_;
    std::map<std::string, std::shared_ptr<PathEnsemble const>> cache_;
};

VerificationReport make_report(std::string check, ResolvedConfig const& rc,
                               std::uint64_t seed, std::string const& inputs)
{
    VerificationReport rep;
    rep.check = std::move(check);
    rep.params = report_params(rc.params, rc.delta, rc.y);
    rep.seed = seed;
    rep.inputs_digest = digest_hex(to_json_string(rc.params) + ";" + inputs);
    return rep;
}

//---------------------------------------------------------------------------//
// Marginal ensembles at h, h/2, h/4 sharing one noise grid
struct HalvingSet
{
    std::vector<double> steps;
    std::vector<std::shared_ptr<PathEnsemble const>> runs;
};

SimConfig halving_base(Context& ctx, ResolvedConfig const& rc)
{
    SimConfig c = make_sim_config(ctx.config(), rc, ctx.workers());
    c.noise_step = rc.h / 4;
    c.snapshot_times = {rc.t0, snap_to_grid(rc.t0, rc.h, 0.5 * (rc.t0 + rc.T)), rc.T};
    c.convention = DiffusionConvention::standard;
    return c;
}

HalvingSet halving(Context& ctx, ResolvedConfig const& rc, int levels)
{
    HalvingSet set;
    SimConfig c = halving_base(ctx, rc);
    for (int l = 0; l < levels; ++l)
    {
        c.step = rc.h / std::pow(2.0, l);
        set.steps.push_back(c.step);
        set.runs.push_back(ctx.ensemble(c));
    }
    return set;
}

double radial_ks(PathEnsemble const& e, std::size_t k, ResolvedConfig const& rc)
{
    double const age = e.times[k] + rc.delta;
    return ks_statistic(EmpiricalCdf(e.radii(k)),
                        [&](double r) { return analytic_radial_cdf(rc.params, age, r); });
}

double leak_fraction(PathEnsemble const& e, std::size_t k, ResolvedConfig const& rc,
                     double* max_ratio = nullptr)
{
    double const R = support_radius(rc.params, e.times[k] + rc.delta);
    double const limit = (1 + rc.leak_margin) * R;
    std::size_t count = 0;
    double worst = 0;
    for (double r : e.radii(k))
    {
        count += r > limit;
        worst = std::max(worst, r / R);
    }
    if (max_ratio)
    {
        *max_ratio = worst;
    }
    return static_cast<double>(count) / static_cast<double>(e.size());
}

double max_leak(PathEnsemble const& e, ResolvedConfig const& rc)
{
    double worst = 0;
    for (std::size_t k = 0; k < e.times.size(); ++k)
    {
        worst = std::max(worst, leak_fraction(e, k, rc));
    }
    return worst;
}

//---------------------------------------------------------------------------//
void marginals_suite(Context& ctx, ResolvedConfig const& rc, SuiteResult& out)
{
    auto const set = halving(ctx, rc, 3);
    auto const& base = *set.runs[0];
    std::size_t const last = base.times.size() - 1;
    std::string const inputs = "h=" + format_double(rc.h) + ";N=" + std::to_string(rc.N)
                               + ";T=" + format_double(rc.T) + ";t0=" + format_double(rc.t0);
    auto rep = make_report("sde_marginals", rc, base.config.seed, inputs);

    std::vector<double> ks;
    for (auto const& run : set.runs)
    {
        ks.push_back(radial_ks(*run, last, rc));
    }
    double const noise = 1 / std::sqrt(static_cast<double>(rc.N));
    rep.add("ks_h", ks[0], rc.ks_tol);
    rep.add("halving_excess_h2", ks[1] - ks[0], noise);
    rep.add("halving_excess_h4", ks[2] - ks[1], noise);
    rep.add("leak_fraction", max_leak(base, rc), rc.overshoot_threshold, Bound::below);

    // Angular uniformity about the center at the horizon
    auto const d = static_cast<std::size_t>(rc.params.d);
    std::size_t const bins = d == 1 ? 2 : 16;
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t i = 0; i < base.size(); ++i)
    {
        auto const x = base.position(last, i);
        if (d == 1)
        {
            if (x[0] != rc.y[0])
            {
                ++counts[x[0] > rc.y[0] ? 1 : 0];
            }
            continue;
        }
        double const theta = std::atan2(x[1] - rc.y[1], x[0] - rc.y[0]) + std::numbers::pi;
        auto b = static_cast<std::size_t>(theta / (2 * std::numbers::pi)
                                          * static_cast<double>(bins));
        ++counts[std::min(b, bins - 1)];
    }
    rep.add("angular_chi_square", chi_square_uniform(counts),
            chi_square_quantile(0.99, bins - 1));

    rep.notes.push_back("KS at h, h/2, h/4: " + format_double(ks[0]) + ", "
                        + format_double(ks[1]) + ", " + format_double(ks[2])
                        + "; common noise step " + format_double(rc.h / 4));
    rep.notes.push_back("99% one-sample critical value "
                        + format_double(ks_critical_one_sample(rc.N)));
    out.reports.push_back(std::move(rep));

    // Same run with sigma = sqrt(a)
    SimConfig lit = halving_base(ctx, rc);
    lit.convention = DiffusionConvention::literal;
    auto const literal = ctx.ensemble(lit);
    auto conv = make_report("convention_discrimination", rc, lit.seed, inputs + ";literal");
    double const lit_ks = radial_ks(*literal, last, rc);
    conv.add("literal_ks", lit_ks, 0.1, Bound::at_least);
    conv.notes.push_back("standard convention KS " + format_double(ks[0]));
    out.reports.push_back(std::move(conv));

    double const age = base.times[last] + rc.delta;
    double const R = support_radius(rc.params, age);
    std::vector<EmpiricalCdf> cdfs;
    for (auto const& run : set.runs)
    {
        cdfs.emplace_back(run->radii(last));
    }
    EmpiricalCdf lit_cdf(literal->radii(last));
    std::ostringstream csv;
    csv << "r,analytic,empirical_h,empirical_h2,empirical_h4,empirical_literal\n";
    for (int i = 0; i <= 200; ++i)
    {
        double const r = 1.1 * R * i / 200.0;
        csv << format_double(r) << ',' << format_double(analytic_radial_cdf(rc.params, age, r));
        for (auto const& c : cdfs)
        {
            csv << ',' << format_double(c(r));
        }
        csv << ',' << format_double(lit_cdf(r)) << '\n';
    }
    out.traces["marginals_cdf.csv"] = csv.str();
}

void support_suite(Context& ctx, ResolvedConfig const& rc, SuiteResult& out)
{
    auto const set = halving(ctx, rc, 2);
    auto const& a = *set.runs[0];
    auto const& b = *set.runs[1];
    std::string const inputs = "h=" + format_double(rc.h) + ";N=" + std::to_string(rc.N)
                               + ";margin=" + format_double(rc.leak_margin);
    auto rep = make_report("support_leakage", rc, a.config.seed, inputs);
    double const la = max_leak(a, rc);
    double const lb = max_leak(b, rc);
    rep.add("leak_fraction_h", la, rc.overshoot_threshold, Bound::below);
    rep.add("leak_fraction_h2", lb, rc.overshoot_threshold, Bound::below);
    rep.add("leak_halving_excess", lb - la, 1 / std::sqrt(static_cast<double>(rc.N)));

    std::ostringstream csv;
    csv << "t,R,max_ratio_h,leak_h,max_ratio_h2,leak_h2\n";
    double worst = 0;
    for (std::size_t k = 0; k < a.times.size(); ++k)
    {
        double ra = 0;
        double rb = 0;
        double const fa = leak_fraction(a, k, rc, &ra);
        double const fb = leak_fraction(b, k, rc, &rb);
        worst = std::max({worst, ra, rb});
        csv << format_double(a.times[k]) << ','
            << format_double(support_radius(rc.params, a.times[k] + rc.delta)) << ','
            << format_double(ra) << ',' << format_double(fa) << ',' << format_double(rb)
            << ',' << format_double(fb) << '\n';
    }
    rep.notes.push_back("largest |X - y| / R over snapshots: " + format_double(worst));
    out.reports.push_back(std::move(rep));
    out.traces["support.csv"] = csv.str();
}

//---------------------------------------------------------------------------//
void weakform_suite(ResolvedConfig const& rc, SuiteResult& out)
{
    auto const& P = rc.params;
    auto good = weakform_check(P, rc.y, rc.r, rc.T, rc.quad_tol);
    std::ostringstream csv;
    csv << "index,rho,nonlinear_residual,p_laplace_residual\n";
    for (std::size_t j = 0; j < 5; ++j)
    {
        std::string const tag = "psi" + std::to_string(j);
        auto const* nl = good.find(tag + "_nonlinear_residual");
        auto const* pl = good.find(tag + "_p_laplace_residual");
        if (nl && pl)
        {
            csv << j << ',' << format_double(radial_test_family(P, rc.y, rc.T)[j].rho) << ','
                << format_double(nl->value) << ',' << format_double(pl->value) << '\n';
        }
    }
    out.reports.push_back(std::move(good));

    auto faults = make_report("weak_form_faults", rc, 0, "t1=" + format_double(rc.r));
    for (auto [name, fault] : {std::pair{"flip_drift", WeakFormFault::flip_drift},
                               {"drop_diffusion", WeakFormFault::drop_diffusion}})
    {
        bool const fails = !weakform_check(P, rc.y, rc.r, rc.T, rc.quad_tol, fault).pass();
        faults.add(std::string(name) + "_detected", fails ? 1.0 : 0.0, 1.0, Bound::at_least);
    }
    out.reports.push_back(std::move(faults));
    out.reports.push_back(initial_layer_check(P, rc.y));
    out.traces["weakform.csv"] = csv.str();
}

void exponents_suite(ResolvedConfig const& rc, SuiteResult& out)
{
    auto rep = make_report("exponents", rc, 0, "grid=5x80");
    for (auto const& c : check_exponents(rc.params))
    {
        rep.add(c.name, c.lhs, -1.0, Bound::above);
        rep.notes.push_back(c.name + ": " + c.inequality);
    }
    std::ostringstream csv;
    csv << "d,p,name,lhs,holds\n";
    std::size_t violations = 0;
    std::size_t points = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (int d = 1; d <= 5; ++d)
    {
        for (int j = 1; j <= 80; ++j)
        {
            double const p = 2 + 4.0 * j / 80;
            for (auto const& c : check_exponents(derive_params(d, p)))
            {
                violations += !c.holds;
                margin = std::min(margin, c.lhs + 1);
                csv << d << ',' << format_double(p) << ',' << c.name << ','
                    << format_double(c.lhs) << ',' << (c.holds ? 1 : 0) << '\n';
            }
            ++points;
        }
    }
    rep.add("grid_violations", static_cast<double>(violations), 0.0);
    rep.add("grid_min_margin", margin, 0.0, Bound::above);
    rep.notes.push_back("grid: d in 1..5, p = 2 + j/20 for j = 1..80 ("
                        + std::to_string(points) + " points)");
    out.reports.push_back(std::move(rep));
    out.traces["exponents.csv"] = csv.str();
}

void integrability_suite(ResolvedConfig const& rc, SuiteResult& out)
{
    auto rep = integrability_check(rc.params, rc.y, rc.T);
    auto rep2 = integrability_check(rc.params, rc.y, 2 * rc.T);
    auto mono = make_report("integrability_faults", rc, 0, "T=" + format_double(rc.T));
    auto const* v1 = rep.find("integral");
    auto const* v2 = rep2.find("integral");
    mono.add("monotone_in_T", v1 && v2 ? v2->value - v1->value : std::nan(""), 0.0,
             Bound::at_least);
    IntegrabilityOptions forced;
    forced.forced_exponent = -1.1;
    bool const diverges = !integrability_check(rc.params, rc.y, rc.T, forced).pass();
    mono.add("forced_exponent_detected", diverges ? 1.0 : 0.0, 1.0, Bound::at_least);

    std::ostringstream csv;
    csv << "t,density\n";
    for (int i = 0; i <= 60; ++i)
    {
        double const t = rc.T * std::pow(10.0, -6.0 + 0.1 * i);
        csv << format_double(t) << ',' << format_double(integrability_density(rc.params, t))
            << '\n';
    }
    out.reports.push_back(std::move(rep));
    out.reports.push_back(std::move(rep2));
    out.reports.push_back(std::move(mono));
    out.traces["integrability.csv"] = csv.str();
}

//---------------------------------------------------------------------------//
void flow_suite(Context& ctx, ResolvedConfig const& rc, SuiteResult& out)
{
    double const start_age = rc.delta + rc.t0;
    out.reports.push_back(
        flow_property_analytic(rc.params, rc.y, start_age, rc.t0, rc.r, rc.T));
    FlowAnalyticOptions bug;
    bug.offset_error = 0.1;
    auto faults = make_report("flow_property_faults", rc, 0, "offset_error=0.1");
    bool const caught
        = !flow_property_analytic(rc.params, rc.y, start_age, rc.t0, rc.r, rc.T, bug).pass();
    faults.add("offset_error_detected", caught ? 1.0 : 0.0, 1.0, Bound::at_least);
    out.reports.push_back(std::move(faults));

    SimConfig c = make_sim_config(ctx.config(), rc, ctx.workers());
    c.snapshot_times = {rc.t0, rc.T};
    out.reports.push_back(flow_property_ensemble(c, rc.r));
}

void markov_suite(Context& ctx, ResolvedConfig const& rc, SuiteResult& out)
{
    SimConfig c = make_sim_config(ctx.config(), rc, ctx.workers());
    c.snapshot_times = {rc.t0, rc.r, rc.T};
    auto const e = ctx.ensemble(c);
    std::size_t const kr = e->snapshot_index(rc.r);
    std::size_t const kt = e->snapshot_index(rc.T);
    ConsistencyOptions opts;
    opts.bins = ctx.config().bins;
    auto main = conditional_consistency_test(*e, kr, kt, opts);

    std::ostringstream csv;
    csv << "bin,ks,critical\n";
    for (auto const& s : main.stats)
    {
        csv << s.name.substr(3, s.name.size() - 6) << ',' << format_double(s.value) << ','
            << format_double(s.tol) << '\n';
    }
    out.reports.push_back(std::move(main));

    auto sanity = make_report("markov_sanity", rc, c.seed,
                              "r=" + format_double(rc.r) + ";t=" + format_double(rc.T));
    ConsistencyOptions same = opts;
    same.streams = RestartStreams::same;
    auto const rep_same = conditional_consistency_test(*e, kr, kt, same);
    double worst = 0;
    for (auto const& s : rep_same.stats)
    {
        worst = std::max(worst, s.value);
    }
    sanity.add("same_stream_max_ks", rep_same.stats.empty() ? std::nan("") : worst, 0.0);
    ConsistencyOptions shifted = opts;
    shifted.shifted_bin = static_cast<long>(opts.bins / 2);
    auto const rep_shift = conditional_consistency_test(*e, kr, kt, shifted);
    auto const* hit = rep_shift.find("bin" + std::to_string(opts.bins / 2) + "_ks");
    sanity.add("shifted_bin_detected", hit && !hit->pass() ? 1.0 : 0.0, 1.0, Bound::at_least);
    out.reports.push_back(std::move(sanity));
    out.traces["markov_bins.csv"] = csv.str();
}

void translation_suite(Context& ctx, ResolvedConfig const& rc, SuiteResult& out)
{
    Point y = rc.y;
    bool const origin = std::all_of(y.begin(), y.end(), [](double v) { return v == 0; });
    if (origin)
    {
        y[0] = 1;
    }
    SimConfig c = make_sim_config(ctx.config(), rc, ctx.workers());
    TranslationOptions opts;
    opts.paths = rc.N;
    opts.r = rc.r;
    opts.t = rc.T;
    auto rep = translation_noninvariance_check(c, y, opts);
    if (origin)
    {
        rep.notes.push_back("center y = 0 replaced by the first unit vector");
    }
    out.reports.push_back(std::move(rep));
}

//---------------------------------------------------------------------------//
GridPtr pde_grid(ResolvedConfig const& rc, std::size_t cells)
{
    return RadialGrid::uniform(rc.params.d, cells,
                               1.2 * support_radius(rc.params, rc.T + rc.delta));
}

PdeTrajectory pde_solve(std::string const& kind, ResolvedConfig const& rc, GridPtr grid,
                        RunConfig const& config)
{
    PdeOptions opts;
    opts.cfl = config.cfl;
    opts.snapshot_times = config.snapshots.empty() ? default_pde_snapshots(rc.T)
                                                   : config.snapshots;
    auto initial = barenblatt_state(rc.params, grid, rc.delta, 0.0);
    if (kind == "nonlinear")
    {
        return solve_plaplace(initial, rc.params.p, rc.T, opts);
    }
    return solve_linearized_fpe(initial, rc.params, rc.delta, rc.T, opts);
}

VerificationReport pde_report(std::string const& kind, ResolvedConfig const& rc,
                              PdeTrajectory const& tr)
{
    auto const& grid = *tr.snapshots.front().grid;
    auto rep = make_report("pde_" + kind, rc, 0,
                           "M=" + std::to_string(grid.cells) + ";T=" + format_double(rc.T));
    for (auto const& s : tr.snapshots)
    {
        auto const exact = barenblatt_state(rc.params, s.grid, s.t + rc.delta, s.t);
        rep.add("l1_t" + tag_time(s.t), l1_distance(s, exact), rc.pde_tol);
    }
    rep.add("mass_drift", tr.max_mass_drift, 1e-10);
    rep.add("clipped_cells", static_cast<double>(tr.clip_log.size()), 0.0);
    rep.add("min_value", tr.min_value, -1e-14, Bound::at_least);
    if (kind == "nonlinear")
    {
        double worst = 0;
        for (auto const& s : tr.snapshots)
        {
            double const R = support_radius(rc.params, s.t + rc.delta);
            worst = std::max(worst, std::fabs(numerical_support_radius(s) - R) / grid.dr);
        }
        rep.add("front_error_cells", worst, 3.0);
    }
    rep.notes.push_back("steps " + std::to_string(tr.steps));
    return rep;
}

void pde_suite(ResolvedConfig const& rc, RunConfig const& config, SuiteResult& out)
{
    auto run = run_pde(config, "nonlinear");
    out.reports.push_back(run.report);

    auto refine = make_report("pde_refinement", rc, 0, "M=" + std::to_string(rc.M));
    std::ostringstream csv;
    csv << "cells,l1_final\n";
    std::vector<double> errs;
    for (std::size_t M : {rc.M / 4, rc.M / 2, rc.M})
    {
        PdeTrajectory tr;
        if (M == rc.M)
        {
            tr = run.trajectory;
        }
        else
        {
            RunConfig small = config;
            small.snapshots = {0.5 * rc.T};
            tr = pde_solve("nonlinear", rc, pde_grid(rc, M), small);
        }
        auto const& last = tr.snapshots.back();
        errs.push_back(l1_distance(last, barenblatt_state(rc.params, last.grid,
                                                          last.t + rc.delta, last.t)));
        csv << M << ',' << format_double(errs.back()) << '\n';
    }
    refine.add("error_ratio_half", errs[1] / errs[0], 1.0, Bound::below);
    refine.add("error_ratio_full", errs[2] / errs[1], 1.0, Bound::below);
    refine.notes.push_back("observed order "
                           + format_double(std::log2(errs[1] / errs[2])));
    out.reports.push_back(std::move(refine));
    out.traces["pde_refinement.csv"] = csv.str();
}

void linearized_suite(ResolvedConfig const& rc, RunConfig const& config, SuiteResult& out)
{
    auto run = pde_solve("linearized", rc, pde_grid(rc, rc.M), config);
    auto rep = pde_report("linearized", rc, run);
    auto const& P = rc.params;

    std::vector<RadialState> exact;
    for (auto const& s : run.snapshots)
    {
        exact.push_back(barenblatt_state(P, s.grid, s.t + rc.delta, s.t));
    }
    auto member = class_membership_check(exact, P, rc.delta, 1 + 1e-6);
    auto const* c_exact = member.find("min_C");
    rep.add("exact_min_C_error", c_exact ? std::fabs(c_exact->value - 1) : std::nan(""),
            1e-6);
    auto numeric = class_membership_check(run.snapshots, P, rc.delta, 1e6);
    if (auto const* c = numeric.find("min_C"))
    {
        rep.notes.push_back("numerical trajectory minimal C " + format_double(c->value));
    }

    // Fault: mass where w_delta vanishes
    std::vector<RadialState> outside{exact.front()};
    outside[0].u.back() = 1e-3;
    bool const caught = !class_membership_check(outside, P, rc.delta, 1e6).pass();
    rep.add("outside_mass_detected", caught ? 1.0 : 0.0, 1.0, Bound::at_least);

    // Two discretizations of the operator agree at second order
    double const s = rc.delta + 0.5 * rc.T;
    double const R = support_radius(P, s);
    std::vector<double> errs;
    for (std::size_t M : {100, 200, 400, 800})
    {
        auto g = RadialGrid::uniform(P.d, M, R);
        std::vector<double> u(M);
        for (std::size_t i = 0; i < M; ++i)
        {
            u[i] = std::exp(-g->centers[i] * g->centers[i]);
        }
        auto forms = discrete_operator_forms(
            *g, u, [&](double r) { return diffusion_radial(P, s, r); },
            [&](double r) { return r > 0 ? drift_coefficient(P, s, r) * r : 0.0; });
        double err = 0;
        for (std::size_t i = 0; i < M; ++i)
        {
            double const r = g->centers[i];
            if (r >= 0.2 * R && r <= 0.8 * R)
            {
                err = std::max(err, std::fabs(forms.divergence[i] - forms.fokker_planck[i]));
            }
        }
        errs.push_back(err);
    }
    double order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < errs.size(); ++k)
    {
        order = std::min(order, std::log2(errs[k - 1] / errs[k]));
    }
    rep.add("operator_form_order", order, 1.8, Bound::at_least);

    std::ostringstream csv;
    csv << "t,l1,mass,numerical_support,exact_support\n";
    for (std::size_t k = 0; k < run.snapshots.size(); ++k)
    {
        auto const& st = run.snapshots[k];
        csv << format_double(st.t) << ',' << format_double(l1_distance(st, exact[k])) << ','
            << format_double(st.mass()) << ',' << format_double(numerical_support_radius(st))
            << ',' << format_double(support_radius(P, st.t + rc.delta)) << '\n';
    }
    out.reports.push_back(std::move(rep));
    out.traces["linearized.csv"] = csv.str();
}

}  // namespace

//---------------------------------------------------------------------------//
json to_json(RunConfig const& c)
{
    return {
        {"command", c.command},
        {"target", c.target},
        {"d", c.d},
        {"p", c.p},
        {"y", c.y},
        {"delta", optional_json(c.delta)},
        {"t0", optional_json(c.t0)},
        {"T", optional_json(c.T)},
        {"h", optional_json(c.h)},
        {"r", optional_json(c.r)},
        {"N", optional_json(c.N)},
        {"M", optional_json(c.M)},
        {"seed", c.seed},
        {"bins", c.bins},
        {"drift_cap", c.drift_cap},
        {"cfl", c.cfl},
        {"convention", c.convention},
        {"snapshots", c.snapshots},
        {"tolerances",
         {{"ks", optional_json(c.tol.ks)},
          {"overshoot_threshold", optional_json(c.tol.overshoot_threshold)},
          {"leak_margin", optional_json(c.tol.leak_margin)},
          {"pde_l1", optional_json(c.tol.pde_l1)},
          {"quadrature", optional_json(c.tol.quadrature)}}},
    };
}

RunConfig run_config_from_json(json const& j)
{
    RunConfig c;
    try
    {
        c.command = j.at("command").get<std::string>();
        c.target = j.value("target", std::string{});
        c.d = j.at("d").get<int>();
        c.p = j.at("p").get<double>();
        c.y = j.value("y", Point{});
        c.delta = optional_from<double>(j, "delta");
        c.t0 = optional_from<double>(j, "t0");
        c.T = optional_from<double>(j, "T");
        c.h = optional_from<double>(j, "h");
        c.r = optional_from<double>(j, "r");
        c.N = optional_from<std::size_t>(j, "N");
        c.M = optional_from<std::size_t>(j, "M");
        c.seed = j.value("seed", c.seed);
        c.bins = j.value("bins", c.bins);
        c.drift_cap = j.value("drift_cap", c.drift_cap);
        c.cfl = j.value("cfl", c.cfl);
        c.convention = j.value("convention", c.convention);
        c.snapshots = j.value("snapshots", std::vector<double>{});
        if (j.contains("tolerances"))
        {
            auto const& t = j.at("tolerances");
            c.tol.ks = optional_from<double>(t, "ks");
            c.tol.overshoot_threshold = optional_from<double>(t, "overshoot_threshold");
            c.tol.leak_margin = optional_from<double>(t, "leak_margin");
            c.tol.pde_l1 = optional_from<double>(t, "pde_l1");
            c.tol.quadrature = optional_from<double>(t, "quadrature");
        }
    }
    catch (json::exception const& e)
    {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    return c;
}

json to_json(ResolvedConfig const& c)
{
    return {
        {"params", json::parse(to_json_string(c.params))},
        {"y", c.y},
        {"delta", c.delta},
        {"t0", c.t0},
        {"T", c.T},
        {"h", c.h},
        {"r", c.r},
        {"N", c.N},
        {"M", c.M},
        {"ks_tol", c.ks_tol},
        {"overshoot_threshold", c.overshoot_threshold},
        {"leak_margin", c.leak_margin},
        {"pde_tol", c.pde_tol},
        {"quad_tol", c.quad_tol},
    };
}

std::vector<std::string> const& suite_names()
{
    static std::vector<std::string> const names{
        "exponents", "integrability", "weakform", "marginals", "support", "flow",
        "markov",    "linearized",    "pde",      "translation", "all"};
    return names;
}

//---------------------------------------------------------------------------//
ResolvedConfig resolve(RunConfig const& c, std::string const& suite)
{
    ResolvedConfig rc;
    if (!(c.p > 2))
    {
        throw ConfigError("p must satisfy p > 2: the profile exponent (p-1)/(p-2) "
                          "is undefined for p <= 2");
    }
    try
    {
        rc.params = derive_params(c.d, c.p);
    }
    catch (std::invalid_argument const& e)
    {
        throw ConfigError(e.what());
    }
    if (!c.y.empty() && c.y.size() != static_cast<std::size_t>(c.d))
    {
        throw ConfigError("y must have d components");
    }
    rc.y = c.y.empty() ? Point(static_cast<std::size_t>(c.d), 0.0) : c.y;

    double delta = 0;
    double T = 1;
    double r = 0.5;
    std::size_t N = 100000;
    if (suite == "markov")
    {
        T = 0.8;
        r = 0.3;
        N = 200000;
    }
    else if (suite == "linearized")
    {
        delta = 0.2;
        T = 0.8;
    }
    else if (suite == "pde" || suite == "nonlinear")
    {
        delta = 0.1;
        T = 0.9;
    }
    rc.delta = c.delta.value_or(delta);
    rc.t0 = c.t0.value_or(0.05);
    rc.T = c.T.value_or(T);
    rc.h = c.h.value_or(1e-3);
    rc.r = c.r.value_or(r);
    rc.N = c.N.value_or(N);
    rc.M = c.M.value_or(2000);
    rc.ks_tol = c.tol.ks.value_or(0.015);
    rc.overshoot_threshold = c.tol.overshoot_threshold.value_or(0.01);
    rc.leak_margin = c.tol.leak_margin.value_or(0.05);
    rc.pde_tol = c.tol.pde_l1.value_or(5e-3);
    rc.quad_tol = c.tol.quadrature.value_or(1e-5);
    return rc;
}

void validate(RunConfig const& c)
{
    auto require = [](bool ok, std::string const& msg) {
        if (!ok)
        {
            throw ConfigError(msg);
        }
    };
    require(c.d >= 1, "d must be >= 1");
    std::vector<std::string> targets;
    if (c.command == "verify")
    {
        require(contains(suite_names(), c.target), "unknown suite '" + c.target + "'");
        targets = c.target == "all"
                      ? std::vector<std::string>(suite_names().begin(), suite_names().end() - 1)
                      : std::vector<std::string>{c.target};
    }
    else if (c.command == "pde")
    {
        require(c.target == "nonlinear" || c.target == "linearized",
                "pde kind must be nonlinear or linearized");
        targets = {c.target};
    }
    else if (c.command == "simulate")
    {
        targets = {"simulate"};
    }
    else if (c.command == "params")
    {
        targets = {"params"};
    }
    else
    {
        throw ConfigError("unknown command '" + c.command + "'");
    }
    require(c.convention == "standard" || c.convention == "literal",
            "convention must be standard or literal");
    require(c.bins >= 1, "bins must be >= 1");
    require(c.drift_cap > 0, "drift cap must be > 0");
    require(c.cfl > 0, "cfl must be > 0");
    require(!c.N || *c.N >= 1, "paths must be >= 1");
    require(!c.M || *c.M >= 2, "cells must be >= 2");
    require(!c.h || *c.h > 0, "h must be > 0");

    for (auto const& t : targets)
    {
        auto const rc = resolve(c, t);
        if (t == "params" || t == "exponents")
        {
            continue;
        }
        require(rc.T > 0, "T must be > 0");
        require(rc.delta >= 0, "delta must be >= 0");
        bool const ensemble = t == "simulate" || contains(ensemble_suites, t);
        if (ensemble)
        {
            require(rc.t0 >= 0 && rc.t0 + rc.delta > 0, "need t0 + delta > 0");
            require(rc.T > rc.t0, "T must exceed t0");
            double const n = (rc.T - rc.t0) / rc.h;
            require(std::fabs(n - std::round(n)) <= 1e-9 * std::max(1.0, n),
                    "T - t0 must be a multiple of h");
            if (t != "simulate" && t != "support" && t != "marginals")
            {
                require(rc.r > rc.t0 && rc.r < rc.T, "r must lie strictly between t0 and T");
            }
        }
        if (t == "translation")
        {
            require(rc.params.markov_admissible,
                    "translation suite needs d >= 2 and p > 2(1 + 1/d)");
        }
        if (t == "weakform")
        {
            require(rc.r > 0 && rc.r < rc.T, "weak form needs 0 < r < T");
        }
        if (t == "linearized" || t == "pde" || t == "nonlinear")
        {
            require(rc.delta > 0, "PDE runs start from w(delta) and need delta > 0");
            require(t != "pde" || rc.M >= 8, "pde suite refinement needs cells >= 8");
            for (double s : c.snapshots)
            {
                require(s > 0 && s < rc.T, "snapshot times must lie in (0, T)");
            }
        }
        if (t == "simulate")
        {
            for (double s : c.snapshots)
            {
                require(s >= rc.t0 && s <= rc.T, "snapshot times must lie in [t0, T]");
            }
        }
    }
}

SimConfig make_sim_config(RunConfig const& config, ResolvedConfig const& rc,
                          unsigned workers)
{
    SimConfig c;
    c.params = rc.params;
    c.center = rc.y;
    c.delta0 = rc.delta;
    c.t0 = rc.t0;
    c.horizon = rc.T;
    c.step = rc.h;
    c.drift_cap = config.drift_cap;
    c.paths = rc.N;
    c.seed = config.seed;
    c.snapshot_times = config.snapshots;
    c.convention = config.convention == "literal" ? DiffusionConvention::literal
                                                  : DiffusionConvention::standard;
    c.workers = workers;
    return c;
}

//---------------------------------------------------------------------------//
bool SuiteResult::pass() const
{
    return !reports.empty()
           && std::all_of(reports.begin(), reports.end(),
                          [](VerificationReport const& r) { return r.pass(); });
}

SuiteResult run_suite(RunConfig const& config, std::string const& suite, unsigned workers)
{
    if (!contains(suite_names(), suite))
    {
        throw ConfigError("unknown suite '" + suite + "'");
    }
    Context ctx(config, workers);
    SuiteResult out;
    std::vector<std::string> order{suite};
    if (suite == "all")
    {
        order.assign(suite_names().begin(), suite_names().end() - 1);
    }
    for (auto const& s : order)
    {
        auto const rc = resolve(config, s);
        if (s == "marginals")
        {
            marginals_suite(ctx, rc, out);
        }
        else if (s == "support")
        {
            support_suite(ctx, rc, out);
        }
        else if (s == "weakform")
        {
            weakform_suite(rc, out);
        }
        else if (s == "exponents")
        {
            exponents_suite(rc, out);
        }
        else if (s == "integrability")
        {
            integrability_suite(rc, out);
        }
        else if (s == "flow")
        {
            flow_suite(ctx, rc, out);
        }
        else if (s == "markov")
        {
            markov_suite(ctx, rc, out);
        }
        else if (s == "translation")
        {
            translation_suite(ctx, rc, out);
        }
        else if (s == "linearized")
        {
            linearized_suite(rc, config, out);
        }
        else if (s == "pde")
        {
            pde_suite(rc, config, out);
        }
    }
    return out;
}

json suite_json(std::string const& suite, SuiteResult const& result)
{
    json reports = json::array();
    for (auto const& r : result.reports)
    {
        reports.push_back(to_json(r));
    }
    return {{"suite", suite}, {"pass", result.pass()}, {"reports", reports}};
}

//---------------------------------------------------------------------------//
PdeRun run_pde(RunConfig const& config, std::string const& kind)
{
    if (kind != "nonlinear" && kind != "linearized")
    {
        throw ConfigError("pde kind must be nonlinear or linearized");
    }
    auto const rc = resolve(config, kind);
    PdeRun run;
    run.trajectory = pde_solve(kind, rc, pde_grid(rc, rc.M), config);
    run.report = pde_report(kind, rc, run.trajectory);
    return run;
}

//---------------------------------------------------------------------------//
}  // namespace pbm
