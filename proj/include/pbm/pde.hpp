// SPDX-License-Identifier: Apache-2.0
//! \file pbm/pde.hpp
//! Radial finite-volume solvers for the p-Laplace evolution and for the
//! linearized Fokker-Planck equation with coefficient a = |grad w_delta|^{p-2}.
#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "barenblatt.hpp"
#include "quadrature.hpp"
#include "report.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
/*!
 * Uniform radial grid on [0, r_max] with M cells.
 *
 * Face j sits at j * dr; cell i spans faces i and i + 1. Areas are those of
 * the (d-1)-spheres through the faces and volumes those of the shells, so the
 * first face has zero area and carries no flux.
 */
struct RadialGrid
{
    int d{};
    std::size_t cells{};
    double r_max{};
    double dr{};
    std::vector<double> faces;
    std::vector<double> centers;
    std::vector<double> areas;
    std::vector<double> volumes;

    static std::shared_ptr<RadialGrid const> uniform(int d, std::size_t cells, double r_max);
};

using GridPtr = std::shared_ptr<RadialGrid const>;

//---------------------------------------------------------------------------//
//! Cell averages at time t
struct RadialState
{
    GridPtr grid;
    double t{};
    std::vector<double> u;

    double mass() const;
};

//---------------------------------------------------------------------------//
struct PdeOptions
{
    double cfl{0.45};
    std::vector<double> snapshot_times;  //!< initial and final are always kept
    double max_dt{std::numeric_limits<double>::infinity()};
    std::size_t max_steps{50'000'000};
    double negative_abort{-1e-14};
};

struct PdeTrajectory
{
    std::vector<RadialState> snapshots;
    std::size_t steps{};
    double max_mass_drift{};  //!< relative, over all accepted steps
    double min_value{};
    std::vector<std::string> clip_log;

    RadialState const& at(double t) const;
};

//! CFL violation, negative cell or step budget exhausted
class PdeAbort : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
// Cell averages of w^0(s, .) from the exact radial distribution function
RadialState barenblatt_state(BarenblattParams const& params, GridPtr grid, double s,
                             double t);

// sum_i |u_i - v_i| vol_i
double l1_distance(RadialState const& a, RadialState const& b);

// Center of the last cell with u_i > threshold (0 if none)
double numerical_support_radius(RadialState const& state, double threshold = 1e-10);

// u_t = div(|grad u|^{p-2} grad u) from initial.t to T
PdeTrajectory solve_plaplace(RadialState const& initial, double p, double T,
                             PdeOptions const& options = {});

// u_t = div(a grad u), a(t, r) = |grad w^0(t + delta, r)|^{p-2}, from initial.t to T
PdeTrajectory solve_linearized_fpe(RadialState const& initial,
                                   BarenblattParams const& params, double delta,
                                   double T, PdeOptions const& options = {});

//---------------------------------------------------------------------------//
//! The two discretizations of the linearized operator for a fixed profile
struct OperatorForms
{
    std::vector<double> divergence;    //!< div(a grad u)
    std::vector<double> fokker_planck; //!< Laplacian(a u) - div(u grad a)
};

// Both forms on a grid with coefficient a(r) and its radial derivative a'(r)
OperatorForms discrete_operator_forms(RadialGrid const& grid,
                                      std::vector<double> const& u,
                                      ScalarFn const& a, ScalarFn const& a_prime);

//---------------------------------------------------------------------------//
/*!
 * Membership of a tabulated trajectory in the comparison class
 * { u : u(t) <= C w_delta(t) on the grid, unit mass }.
 *
 * Reports the minimal feasible C over all snapshots (infinite when mass sits
 * where w_delta vanishes) and the worst mass deviation.
 */
VerificationReport class_membership_check(std::vector<RadialState> const& candidate,
                                          BarenblattParams const& params,
                                          double delta, double C,
                                          double tol = 1e-12);

//---------------------------------------------------------------------------//
}  // namespace pbm
