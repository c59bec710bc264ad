// SPDX-License-Identifier: Apache-2.0
//! \file pbm/suites.hpp
//! Run configuration and the named verification suites behind the CLI.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pde.hpp"
#include "report.hpp"
#include "sde.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
struct ToleranceOverrides
{
    std::optional<double> ks;                   //!< marginal KS at step h
    std::optional<double> overshoot_threshold;  //!< allowed leak fraction
    std::optional<double> leak_margin;          //!< leak radius (1 + margin) R
    std::optional<double> pde_l1;
    std::optional<double> quadrature;           //!< weak-form residual
};

/*!
 * Everything that determines a run's outputs.
 *
 * Unset optionals take the per-suite defaults listed by \c resolve. Worker
 * count and output location are execution details and are not part of the
 * configuration, so equal configurations give byte-identical artifacts.
 */
struct RunConfig
{
    std::string command;  //!< params | simulate | verify | pde
    std::string target;   //!< suite name or pde kind
    int d{2};
    double p{4};
    Point y;  //!< empty means the origin
    std::optional<double> delta;
    std::optional<double> t0;
    std::optional<double> T;
    std::optional<double> h;
    std::optional<double> r;  //!< restart, conditioning or first weak-form time
    std::optional<std::size_t> N;
    std::optional<std::size_t> M;
    std::uint64_t seed{1};
    std::size_t bins{5};
    double drift_cap{1e3};
    double cfl{0.45};
    std::string convention{"standard"};
    std::vector<double> snapshots;
    ToleranceOverrides tol;
};

nlohmann::json to_json(RunConfig const& config);
RunConfig run_config_from_json(nlohmann::json const& j);

//! Concrete values for one suite or command
struct ResolvedConfig
{
    BarenblattParams params;
    Point y;
    double delta{};
    double t0{};
    double T{};
    double h{};
    double r{};
    std::size_t N{};
    std::size_t M{};
    double ks_tol{};
    double overshoot_threshold{};
    double leak_margin{};
    double pde_tol{};
    double quad_tol{};
};

nlohmann::json to_json(ResolvedConfig const& config);

std::vector<std::string> const& suite_names();

// Throws ConfigError for any invalid field
void validate(RunConfig const& config);

// Per-suite defaults merged with the explicit fields
ResolvedConfig resolve(RunConfig const& config, std::string const& suite);

// SimConfig for the simulate command and the ensemble suites
SimConfig make_sim_config(RunConfig const& config, ResolvedConfig const& resolved,
                          unsigned workers);

//---------------------------------------------------------------------------//
struct SuiteResult
{
    std::vector<VerificationReport> reports;
    std::map<std::string, std::string> traces;  //!< file name -> CSV text

    bool pass() const;
};

// Run a suite (or "all"); workers only affects wall time
SuiteResult run_suite(RunConfig const& config, std::string const& suite,
                      unsigned workers = 0);

// {suite, pass, reports: [...]}
nlohmann::json suite_json(std::string const& suite, SuiteResult const& result);

//---------------------------------------------------------------------------//
struct PdeRun
{
    PdeTrajectory trajectory;
    VerificationReport report;
};

// Nonlinear or linearized solve from w(delta) with closed-form comparison
PdeRun run_pde(RunConfig const& config, std::string const& kind);

//---------------------------------------------------------------------------//
}  // namespace pbm
