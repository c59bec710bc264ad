// SPDX-License-Identifier: Apache-2.0
//! \file pbm_cli.cpp
//! Command-line front end: params, simulate, verify, pde, replay.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbm/io.hpp"
#include "pbm/params.hpp"
#include "pbm/quadrature.hpp"
#include "pbm/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pbm;

namespace
{
enum Exit
{
    exit_pass = 0,
    exit_fail = 1,
    exit_usage = 2,
    exit_abort = 3
};

struct Execution
{
    std::string out;
    bool force{false};
    unsigned workers{0};
};

template<class T>
void optional_flag(CLI::App* app, std::string const& name, std::optional<T>& target,
                   std::string const& help)
{
    app->add_option_function<T>(name, [&target](T const& v) { target = v; }, help);
}

void model_flags(CLI::App* app, RunConfig& c)
{
    app->add_option("--d", c.d, "spatial dimension")->capture_default_str();
    app->add_option("--p", c.p, "p-Laplace exponent, p > 2")->capture_default_str();
}

void run_flags(CLI::App* app, RunConfig& c, Execution& x)
{
    model_flags(app, c);
    app->add_option("--y", c.y, "center, comma separated")->delimiter(',');
    optional_flag(app, "--delta", c.delta, "time offset: physical time is t + delta");
    optional_flag(app, "--t0", c.t0, "warm-start time of the ensemble");
    optional_flag(app, "--T", c.T, "horizon");
    optional_flag(app, "--h", c.h, "Euler-Maruyama step");
    optional_flag(app, "--r", c.r, "restart / conditioning / first weak-form time");
    optional_flag(app, "--paths,--N", c.N, "number of paths");
    optional_flag(app, "--cells,--M", c.M, "radial grid cells");
    app->add_option("--seed", c.seed, "global seed")->capture_default_str();
    app->add_option("--bins", c.bins, "radial bins of the Markov test")->capture_default_str();
    app->add_option("--drift-cap", c.drift_cap, "drift taming level")->capture_default_str();
    app->add_option("--cfl", c.cfl, "PDE CFL number")->capture_default_str();
    app->add_option("--convention", c.convention, "standard (sqrt(2a)) or literal (sqrt(a))")
        ->capture_default_str();
    app->add_option("--snapshots", c.snapshots, "snapshot times, comma separated")
        ->delimiter(',');
    optional_flag(app, "--ks-tol", c.tol.ks, "marginal KS tolerance");
    optional_flag(app, "--overshoot-threshold", c.tol.overshoot_threshold,
                  "allowed fraction of paths beyond the leak radius");
    optional_flag(app, "--leak-margin", c.tol.leak_margin, "leak radius is (1 + margin) R(t)");
    optional_flag(app, "--pde-tol", c.tol.pde_l1, "PDE L1 tolerance");
    optional_flag(app, "--quad-tol", c.tol.quadrature, "weak-form residual tolerance");
    app->add_option("--workers", x.workers, "worker threads (0: all cores)");
    app->add_option("--out", x.out, "output directory");
    app->add_flag("--force", x.force, "overwrite a non-empty output directory");
}

void io_flags(CLI::App* app, Execution& x)
{
    app->add_option("--workers", x.workers, "worker threads (0: all cores)");
    app->add_option("--out", x.out, "output directory");
    app->add_flag("--force", x.force, "overwrite a non-empty output directory");
}

//---------------------------------------------------------------------------//
fs::path output_dir(RunConfig const& c, Execution const& x)
{
    if (!x.out.empty())
    {
        return x.out;
    }
    std::string name = c.command;
    if (!c.target.empty())
    {
        name += "-" + c.target;
    }
    return default_output_root() / name;
}

json effective(RunConfig const& c)
{
    json out = json::object();
    if (c.command == "verify" && c.target == "all")
    {
        for (auto const& s : suite_names())
        {
            if (s != "all")
            {
                out[s] = to_json(resolve(c, s));
            }
        }
    }
    else
    {
        out[c.target.empty() ? c.command : c.target]
            = to_json(resolve(c, c.target.empty() ? c.command : c.target));
    }
    return out;
}

json manifest(RunConfig const& c, std::vector<std::string> const& outputs,
              std::string const& status)
{
    return {{"code_version", code_version},
            {"config", to_json(c)},
            {"effective", effective(c)},
            {"outputs", outputs},
            {"status", status}};
}

//---------------------------------------------------------------------------//
int run_simulate(RunConfig const& c, Execution const& x, fs::path const& dir)
{
    auto const rc = resolve(c, "simulate");
    SimConfig sim = make_sim_config(c, rc, x.workers);
    try
    {
        auto const e = simulate(sim);
        {
            std::ofstream os(dir / "ensemble.csv", std::ios::binary | std::ios::trunc);
            write_ensemble_csv(os, e);
            if (!os)
            {
                throw std::runtime_error("cannot write ensemble.csv");
            }
        }
        write_text(dir / "ensemble.json", dump_json(ensemble_sidecar(sim)));
        write_text(dir / "manifest.json",
                   dump_json(manifest(c, {"ensemble.csv", "ensemble.json"}, "ok")));
        std::cout << "wrote " << e.size() << " paths x " << e.times.size()
                  << " snapshots to " << dir.string() << "\n";
        return exit_pass;
    }
    catch (NumericalAbort const& err)
    {
        json m = manifest(c, {}, "abort");
        m["abort"] = {{"path", err.path()}, {"step", err.step()}, {"message", err.what()}};
        write_text(dir / "manifest.json", dump_json(m));
        throw;
    }
}

int run_verify(RunConfig const& c, Execution const& x, fs::path const& dir)
{
    auto const result = run_suite(c, c.target, x.workers);
    std::vector<std::string> outputs{"report.json"};
    write_text(dir / "report.json", dump_json(suite_json(c.target, result)));
    for (auto const& [name, text] : result.traces)
    {
        write_text(dir / name, text);
        outputs.push_back(name);
    }
    bool const pass = result.pass();
    write_text(dir / "manifest.json", dump_json(manifest(c, outputs, pass ? "pass" : "fail")));
    for (auto const& r : result.reports)
    {
        std::cout << (r.pass() ? "PASS " : "FAIL ") << r.check << "\n";
        for (auto const& s : r.stats)
        {
            if (!s.pass())
            {
                std::cout << "  " << s.name << " = " << format_double(s.value)
                          << " (tol " << format_double(s.tol) << ")\n";
            }
        }
    }
    std::cout << (pass ? "PASS" : "FAIL") << " suite " << c.target << "\n";
    return pass ? exit_pass : exit_fail;
}

int run_pde_command(RunConfig const& c, fs::path const& dir)
{
    try
    {
        auto const run = run_pde(c, c.target);
        {
            std::ofstream os(dir / "trajectory.csv", std::ios::binary | std::ios::trunc);
            write_trajectory_csv(os, run.trajectory.snapshots);
        }
        auto const& grid = *run.trajectory.snapshots.front().grid;
        write_text(dir / "trajectory.json",
                   dump_json(trajectory_sidecar(grid, c.target, c.cfl, run.trajectory.steps)));
        write_text(dir / "summary.json", dump_json(to_json(run.report)));
        bool const pass = run.report.pass();
        write_text(dir / "manifest.json",
                   dump_json(manifest(c, {"trajectory.csv", "trajectory.json", "summary.json"},
                                      pass ? "pass" : "fail")));
        for (auto const& s : run.report.stats)
        {
            std::cout << (s.pass() ? "PASS " : "FAIL ") << s.name << " = "
                      << format_double(s.value) << "\n";
        }
        return pass ? exit_pass : exit_fail;
    }
    catch (PdeAbort const& err)
    {
        json m = manifest(c, {}, "abort");
        m["abort"] = {{"message", err.what()}};
        write_text(dir / "manifest.json", dump_json(m));
        throw;
    }
}

int dispatch(RunConfig const& c, Execution const& x)
{
    validate(c);
    if (c.command == "params")
    {
        std::cout << to_json_string(resolve(c, "params").params) << "\n";
        return exit_pass;
    }
    fs::path const dir = output_dir(c, x);
    prepare_output_dir(dir, x.force);
    if (c.command == "simulate")
    {
        return run_simulate(c, x, dir);
    }
    if (c.command == "verify")
    {
        return run_verify(c, x, dir);
    }
    return run_pde_command(c, dir);
}

}  // namespace

//---------------------------------------------------------------------------//
int main(int argc, char** argv)
{
    CLI::App app{"p-Laplace Barenblatt particle simulation and verification toolkit"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    RunConfig params_cfg;
    params_cfg.command = "params";
    auto* params = app.add_subcommand("params", "print derived Barenblatt constants as JSON");
    model_flags(params, params_cfg);

    RunConfig sim_cfg;
    sim_cfg.command = "simulate";
    Execution sim_x;
    auto* sim = app.add_subcommand("simulate", "simulate the particle ensemble");
    run_flags(sim, sim_cfg, sim_x);

    RunConfig verify_cfg;
    verify_cfg.command = "verify";
    Execution verify_x;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", verify_cfg.target, "suite name")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    run_flags(verify, verify_cfg, verify_x);

    RunConfig pde_cfg;
    pde_cfg.command = "pde";
    Execution pde_x;
    auto* pde = app.add_subcommand("pde", "solve the radial PDE from w(delta)");
    pde->add_option("--kind", pde_cfg.target, "nonlinear or linearized")
        ->required()
        ->check(CLI::IsMember({"nonlinear", "linearized"}));
    run_flags(pde, pde_cfg, pde_x);

    std::string manifest_path;
    Execution replay_x;
    auto* replay = app.add_subcommand("replay", "rerun the configuration in a manifest.json");
    replay->add_option("manifest", manifest_path, "path to manifest.json")->required();
    io_flags(replay, replay_x);

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? exit_pass : exit_usage;
    }

    try
    {
        if (*params)
        {
            return dispatch(params_cfg, {});
        }
        if (*sim)
        {
            return dispatch(sim_cfg, sim_x);
        }
        if (*verify)
        {
            return dispatch(verify_cfg, verify_x);
        }
        if (*pde)
        {
            return dispatch(pde_cfg, pde_x);
        }
        json j;
        try
        {
            j = json::parse(read_text(manifest_path));
        }
        catch (json::exception const& e)
        {
            throw ConfigError(std::string("malformed manifest: ") + e.what());
        }
        if (!j.contains("config"))
        {
            throw ConfigError("manifest has no config");
        }
        return dispatch(run_config_from_json(j.at("config")), replay_x);
    }
    catch (std::invalid_argument const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (NumericalAbort const& e)
    {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return exit_abort;
    }
    catch (PdeAbort const& e)
    {
        std::cerr << "solver abort: " << e.what() << "\n";
        return exit_abort;
    }
    catch (QuadratureError const& e)
    {
        std::cerr << "quadrature abort: " << e.what() << "\n";
        return exit_abort;
    }
}
