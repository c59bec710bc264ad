// SPDX-License-Identifier: Apache-2.0
//! \file acceptance.cpp
//! Acceptance criteria 1-11. One PASS/FAIL line per criterion; exit 0 iff all
//! pass. The first argument is the path of the pbm executable.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "pbm/io.hpp"
#include "pbm/params.hpp"
#include "pbm/quadrature.hpp"
#include "pbm/suites.hpp"
#include "pbm/verify.hpp"

namespace fs = std::filesystem;
using namespace pbm;

namespace
{
std::string g_cli;

struct Outcome
{
    bool pass{};
    std::string detail;
};

void fail_if(Outcome& o, bool bad, std::string const& what)
{
    if (bad)
    {
        o.pass = false;
        o.detail += (o.detail.empty() ? "" : "; ") + what;
    }
}

std::string first_failure(SuiteResult const& r)
{
    for (auto const& rep : r.reports)
    {
        for (auto const& s : rep.stats)
        {
            if (!s.pass())
            {
                return rep.check + "." + s.name + " = " + format_double(s.value) + " (tol "
                       + format_double(s.tol) + ")";
            }
        }
    }
    return r.reports.empty() ? "no reports" : "";
}

VerificationReport const* find_report(SuiteResult const& r, std::string const& check)
{
    for (auto const& rep : r.reports)
    {
        if (rep.check == check)
        {
            return &rep;
        }
    }
    return nullptr;
}

RunConfig reference(std::string const& target)
{
    RunConfig c;
    c.command = "verify";
    c.target = target;
    return c;
}

//---------------------------------------------------------------------------//
Outcome normalization()
{
    Outcome o{true, ""};
    for (auto [d, p] : {std::pair{2, 4.0}, {3, 4.0}, {2, 3.5}})
    {
        auto const P = derive_params(d, p);
        for (double t : {0.5, 1.0, 2.0})
        {
            double const R = support_radius(P, t);
            double const mass = unit_sphere_area(d)
                                * integrate_or_throw(
                                    [&](double r) {
                                        return std::pow(r, d - 1) * density_radial(P, t, r);
                                    },
                                    0, R, 1e-12, Grading::right);
            fail_if(o, std::fabs(mass - 1) > 1e-8,
                    "mass(d=" + std::to_string(d) + ",p=" + format_double(p)
                        + ",t=" + format_double(t) + ") = " + format_double(mass));
        }
        double const beta = oracle::c1_beta(d, p);
        fail_if(o, std::fabs(P.C1 - beta) > 1e-8, "C1 vs Beta reduction");
    }
    double const closed = std::cbrt(4 / (3 * std::numbers::pi * std::numbers::pi));
    fail_if(o, std::fabs(derive_params(2, 4.0).C1 - closed) > 1e-8, "C1 vs (4/(3 pi^2))^(1/3)");
    return o;
}

Outcome coefficients()
{
    Outcome o{true, ""};
    auto const P = derive_params(2, 4.0);
    Point const y{0.3, -0.2};
    // Deterministic quasi-random probes: Weyl sequence in (t, radius, angle)
    double worst_grad = 0;
    double worst_drift = 0;
    for (int i = 0; i < 1000; ++i)
    {
        double const u1 = std::fmod(0.5 + i * 0.6180339887498949, 1.0);
        double const u2 = std::fmod(0.5 + i * 0.4142135623730951, 1.0);
        double const u3 = std::fmod(0.5 + i * 0.7320508075688772, 1.0);
        double const t = 0.5 + 1.5 * u1;
        double const R = support_radius(P, t);
        double const rad = (0.05 + 0.9 * u2) * R;
        double const ang = 2 * std::numbers::pi * u3;
        Point const x{y[0] + rad * std::cos(ang), y[1] + rad * std::sin(ang)};
        double const h = 1e-4 * R;
        auto const g = gradient(P, y, t, x);
        auto const b = drift_b(P, y, 0.0, t, x);
        double gn = std::hypot(g[0], g[1]);
        double bn = std::hypot(b[0], b[1]);
        double ge = 0;
        double be = 0;
        for (std::size_t c = 0; c < 2; ++c)
        {
            auto along = [&](auto&& f, double s) {
                Point z = x;
                z[c] += s;
                return f(z);
            };
            auto w = [&](Point const& z) { return density(P, y, t, z); };
            auto a = [&](Point const& z) { return diffusion_a(P, y, 0.0, t, z); };
            auto fd = [&](auto&& f) {
                return (-along(f, 2 * h) + 8 * along(f, h) - 8 * along(f, -h)
                        + along(f, -2 * h))
                       / (12 * h);
            };
            ge = std::max(ge, std::fabs(fd(w) - g[c]));
            be = std::max(be, std::fabs(fd(a) - b[c]));
        }
        worst_grad = std::max(worst_grad, ge / gn);
        worst_drift = std::max(worst_drift, be / bn);
    }
    fail_if(o, !(worst_grad <= 1e-5), "gradient rel err " + format_double(worst_grad));
    fail_if(o, !(worst_drift <= 1e-5), "drift rel err " + format_double(worst_drift));
    if (o.pass)
    {
        o.detail = "max rel err gradient " + format_double(worst_grad) + ", drift "
                   + format_double(worst_drift);
    }
    return o;
}

Outcome exponents()
{
    Outcome o{true, ""};
    auto const r = run_suite(reference("exponents"), "exponents");
    fail_if(o, !r.pass(), first_failure(r));
    auto const integ = integrability_check(derive_params(2, 4.0), {0, 0}, 1.0);
    fail_if(o, !integ.pass(), "integrability: " + to_json(integ).dump());
    if (auto const* v = integ.find("integral"); v && o.pass)
    {
        o.detail = "integral " + format_double(v->value);
    }
    return o;
}

Outcome weak_form()
{
    Outcome o{true, ""};
    auto const P = derive_params(2, 4.0);
    auto const good = weakform_check(P, {0, 0}, 0.5, 1.0, 1e-5);
    fail_if(o, !good.pass(), "residuals: " + to_json(good).dump());
    fail_if(o, good.stats.size() != 15, "expected 15 statistics");
    for (auto fault : {WeakFormFault::flip_drift, WeakFormFault::drop_diffusion})
    {
        fail_if(o, weakform_check(P, {0, 0}, 0.5, 1.0, 1e-5, fault).pass(),
                "injected fault passed");
    }
    return o;
}

Outcome suite_outcome(std::string const& suite)
{
    Outcome o{true, ""};
    auto const r = run_suite(reference(suite), suite);
    fail_if(o, !r.pass(), first_failure(r));
    return o;
}

Outcome marginals_outcome(SuiteResult const& r)
{
    Outcome o{true, ""};
    auto const* m = find_report(r, "sde_marginals");
    fail_if(o, !m, "no marginals report");
    if (m)
    {
        for (auto const& s : m->stats)
        {
            fail_if(o, !s.pass(), s.name + " = " + format_double(s.value));
        }
        if (o.pass)
        {
            o.detail = m->notes.front();
        }
    }
    return o;
}

Outcome convention()
{
    Outcome o{true, ""};
    RunConfig c = reference("marginals");
    c.command = "simulate";
    c.convention = "literal";
    auto const rc = resolve(c, "simulate");
    auto const e = simulate(make_sim_config(c, rc, 0));
    auto const k = e.times.size() - 1;
    double const ks = ks_statistic(EmpiricalCdf(e.radii(k)), [&](double r) {
        return analytic_radial_cdf(rc.params, e.times[k] + rc.delta, r);
    });
    fail_if(o, !(ks >= 0.1), "literal KS " + format_double(ks));
    o.detail = "literal KS " + format_double(ks);
    return o;
}

Outcome flow()
{
    Outcome o{true, ""};
    auto const r = run_suite(reference("flow"), "flow");
    auto const* e = find_report(r, "flow_property_ensemble");
    fail_if(o, !e || !e->pass(), first_failure(r));
    fail_if(o, !r.pass(), first_failure(r));
    if (e && o.pass)
    {
        o.detail = "two-sample KS " + format_double(e->find("two_sample_ks")->value);
    }
    return o;
}

//---------------------------------------------------------------------------//
int shell(std::string const& cmd)
{
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_tree(fs::path const& a, fs::path const& b, std::string& why)
{
    std::vector<fs::path> files;
    for (auto const& e : fs::directory_iterator(a))
    {
        files.push_back(e.path().filename());
    }
    std::size_t count_b = 0;
    for ([[maybe_unused]] auto const& e : fs::directory_iterator(b))
    {
        ++count_b;
    }
    if (files.size() != count_b || files.empty())
    {
        why = "file sets differ in " + a.string();
        return false;
    }
    for (auto const& f : files)
    {
        if (read_text(a / f) != read_text(b / f))
        {
            why = "differs: " + (a / f).string();
            return false;
        }
    }
    return true;
}

Outcome determinism()
{
    Outcome o{true, ""};
    fs::path const root = fs::temp_directory_path()
                          / ("pbm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    std::string const cli = "'" + g_cli + "' ";
    auto out = [&](char const* n) { return "--out '" + (root / n).string() + "' > /dev/null"; };

    struct Case
    {
        std::string args;
        std::string name;
    };
    std::vector<Case> const cases{
        {"simulate --paths 20000 --T 0.5 --y 0.25,-0.5 --seed 7", "sim"},
        {"verify markov --paths 20000 --T 0.4 --r 0.2 --seed 3", "markov"},
        {"verify flow --paths 10000 --T 0.4 --r 0.2", "flow"},
        {"pde --kind linearized --cells 300", "lin"},
    };
    for (auto const& c : cases)
    {
        std::string const one = c.name + "_w1";
        std::string const many = c.name + "_w4";
        std::string const again = c.name + "_replay";
        int const rc1 = shell(cli + c.args + " --workers 1 " + out(one.c_str()));
        int const rc2 = shell(cli + c.args + " --workers 4 " + out(many.c_str()));
        int const rc3 = shell(cli + "replay '" + (root / one / "manifest.json").string()
                              + "' --workers 2 " + out(again.c_str()));
        fail_if(o, rc1 != 0 || rc2 != 0 || rc3 != 0, c.name + " exit codes");
        std::string why;
        fail_if(o, !same_tree(root / one, root / many, why), why);
        fail_if(o, !same_tree(root / one, root / again, why), why);
    }

    // In-process: reports independent of worker count
    RunConfig c = reference("flow");
    c.N = 5000;
    c.T = 0.3;
    c.r = 0.15;
    auto const a = suite_json("flow", run_suite(c, "flow", 1)).dump();
    auto const b = suite_json("flow", run_suite(c, "flow", 3)).dump();
    fail_if(o, a != b, "in-process flow report differs across worker counts");
    fs::remove_all(root);
    return o;
}

//---------------------------------------------------------------------------//
struct Criterion
{
    int id;
    std::string name;
    double budget_seconds;  //!< <= 0: none
    std::function<Outcome()> run;
};
}  // namespace

int main(int argc, char** argv)
{
    if (argc < 2)
    {
        std::cerr << "usage: acceptance <path to pbm>\n";
        return 2;
    }
    g_cli = argv[1];

    SuiteResult marginals;
    std::vector<Criterion> const criteria{
        {1, "normalization", 5, normalization},
        {2, "coefficient finite differences", 5, coefficients},
        {3, "exponent inequalities and integrability", 10, exponents},
        {4, "weak-form identities", 30, weak_form},
        {5, "nonlinear PDE vs Barenblatt", 120, [] { return suite_outcome("pde"); }},
        {6, "linearized PDE and class membership", 120,
         [] { return suite_outcome("linearized"); }},
        {7, "SDE marginals, step halving, leakage", 300,
         [&] {
             marginals = run_suite(reference("marginals"), "marginals");
             return marginals_outcome(marginals);
         }},
        {8, "convention discrimination", 300, convention},
        {9, "flow property", 300, flow},
        {10, "Markov conditional consistency", 600, [] { return suite_outcome("markov"); }},
        {11, "determinism across worker counts", 0, determinism},
    };

    bool all = true;
    for (auto const& c : criteria)
    {
        auto const start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        double const secs
            = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && secs > c.budget_seconds)
        {
            o.pass = false;
            o.detail += (o.detail.empty() ? "" : "; ") + std::string("over runtime budget ")
                        + format_double(c.budget_seconds) + " s";
        }
        all = all && o.pass;
        std::ostringstream line;
        line << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " ("
             << std::fixed;
        line.precision(1);
        line << secs << " s)";
        if (!o.detail.empty())
        {
            line << ": " << o.detail;
        }
        std::cout << line.str() << std::endl;
    }
    return all ? 0 : 1;
}
