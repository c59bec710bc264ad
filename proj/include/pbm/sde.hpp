// SPDX-License-Identifier: Apache-2.0
//! \file pbm/sde.hpp
//! Ensemble Euler-Maruyama for dX = b(t,X) dt + sqrt(2 a(t,X)) dW with the
//! Barenblatt coefficients, drift taming and marginal snapshots.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "barenblatt.hpp"
#include "report.hpp"
#include "stats.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
//! Noise scale against a standard Wiener process
enum class DiffusionConvention
{
    standard,  //!< sigma = sqrt(2a): generator a Laplacian + b . grad
    literal    //!< sigma = sqrt(a): half the required diffusion
};

/*!
 * Simulation parameters.
 *
 * The clock runs from \c t0 to \c horizon on the grid t_n = t0 + n h; the
 * coefficients are evaluated at physical time t + delta0 and the initial law
 * is w^y(t0 + delta0). When \c noise_step is smaller than \c step, Brownian
 * increments are sums of increments on the finer noise grid, which gives
 * common random numbers across step sizes sharing one noise grid.
 */
struct SimConfig
{
    BarenblattParams params;
    Point center;
    double delta0{0};
    double t0{0.05};
    double horizon{1};
    double step{1e-3};
    double noise_step{0};  //!< 0 means equal to step
    double drift_cap{1e3};
    std::size_t paths{100000};
    std::uint64_t seed{1};
    std::uint32_t generation{0};
    std::vector<double> snapshot_times;  //!< empty means {t0, horizon}
    DiffusionConvention convention{DiffusionConvention::standard};
    unsigned workers{0};  //!< 0 means hardware concurrency
    bool record_paths{false};

    void validate() const;
    double effective_noise_step() const
    {
        return noise_step > 0 ? noise_step : step;
    }
    //! Grid index of a clock time; throws if off the grid
    std::int64_t step_index(double t) const;
};

//---------------------------------------------------------------------------//
//! NaN/Inf detected during a step
class NumericalAbort : public std::runtime_error
{
  public:
    NumericalAbort(std::size_t path, std::int64_t step, std::string const& detail);
    std::size_t path() const { return path_; }
    std::int64_t step() const { return step_; }

  private:
    std::size_t path_;
    std::int64_t step_;
};

//---------------------------------------------------------------------------//
/*!
 * Marginal snapshots of N paths. positions[k] holds N*d coordinates for
 * snapshot time times[k], path-major.
 */
struct PathEnsemble
{
    SimConfig config;
    double start_time{};
    std::vector<double> times;
    std::vector<std::vector<double>> positions;
    std::vector<std::uint64_t> path_ids;

    std::size_t size() const { return path_ids.size(); }
    int dim() const { return config.params.d; }
    std::span<double const> position(std::size_t snapshot, std::size_t path) const
    {
        auto const d = static_cast<std::size_t>(dim());
        return std::span<double const>(positions[snapshot]).subspan(path * d, d);
    }
    //! Index of the snapshot at clock time t; throws if absent
    std::size_t snapshot_index(double t) const;
    //! Distances |X - center| at a snapshot
    std::vector<double> radii(std::size_t snapshot,
                              std::span<double const> center) const;
    std::vector<double> radii(std::size_t snapshot) const
    {
        return radii(snapshot, config.center);
    }
};

//---------------------------------------------------------------------------//
// Exact initial sample from w^y(t0 + delta0), then Euler-Maruyama to horizon
PathEnsemble simulate(SimConfig const& config);

// Simulate from given positions (N*d, path-major) starting at grid time
// `start`; snapshots are the config times >= start (plus start itself)
PathEnsemble simulate_from(SimConfig const& config,
                           double start,
                           std::vector<double> positions,
                           std::vector<std::uint64_t> path_ids);

enum class RestartStreams
{
    fresh,  //!< next generation of streams: independent noise
    same    //!< reuse the original streams: reproduces the direct paths
};

// Continue from snapshot r to a new horizon
PathEnsemble restart(PathEnsemble const& ensemble,
                     std::size_t snapshot,
                     double new_horizon,
                     RestartStreams streams = RestartStreams::fresh);

// Empirical CDF of |X - center| at a snapshot
EmpiricalCdf empirical_radial_cdf(PathEnsemble const& ensemble,
                                  std::size_t snapshot,
                                  std::span<double const> center);

//---------------------------------------------------------------------------//
struct ConsistencyOptions
{
    std::size_t bins{5};
    std::size_t min_count{100};
    RestartStreams streams{RestartStreams::fresh};
    //! Fault injection: shift the restart radii of one bin outward
    long shifted_bin{-1};
    double shift{0.5};
};

// Conditional (two-time) Markov consistency, per radial bin at time r
VerificationReport conditional_consistency_test(PathEnsemble const& ensemble,
                                                std::size_t r_snapshot,
                                                std::size_t t_snapshot,
                                                ConsistencyOptions const& options = {});

//---------------------------------------------------------------------------//
}  // namespace pbm
