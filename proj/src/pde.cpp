// SPDX-License-Identifier: Apache-2.0
//! \file pde.cpp
#include "pbm/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pbm
{
namespace
{
//---------------------------------------------------------------------------//
constexpr std::size_t clip_log_limit = 100;

void require_state(RadialState const& s)
{
    if (!s.grid || s.u.size() != s.grid->cells)
    {
        throw std::invalid_argument("state does not match its grid");
    }
}

std::vector<double> merged_targets(double t_begin, double T,
                                   std::vector<double> const& requested)
{
    std::vector<double> out;
    for (double t : requested)
    {
        if (t > t_begin && t < T)
        {
            out.push_back(t);
        }
    }
    out.push_back(T);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

//---------------------------------------------------------------------------//
/*!
 * Explicit conservative stepper shared by both solvers.
 *
 * The callback fills, for every interior face j = 1..M-1, the conductance
 * kappa_j (flux = kappa_j (u_{j} - u_{j-1}) / dr) and the flux sensitivity
 * c_j that bounds the monotone step. The first and last faces carry no flux.
 */
template<class Conductance>
PdeTrajectory march(RadialState const& initial, double T, PdeOptions const& options,
                    Conductance&& conductance)
{
    require_state(initial);
    if (!(options.cfl > 0) || options.cfl > 1)
    {
        throw PdeAbort("CFL number must lie in (0, 1], got "
                       + format_double(options.cfl));
    }
    if (!(T >= initial.t))
    {
        throw std::invalid_argument("final time precedes the initial time");
    }
    RadialGrid const& g = *initial.grid;
    std::size_t const M = g.cells;
    double const dr = g.dr;

    PdeTrajectory out;
    out.snapshots.push_back(initial);
    std::vector<double> u = initial.u;
    std::vector<double> kappa(M + 1, 0.0);
    std::vector<double> sens(M + 1, 0.0);
    std::vector<double> flux(M + 1, 0.0);
    double const mass0 = initial.mass();
    double const mass_scale = std::max(std::fabs(mass0), 1e-300);
    out.min_value = *std::min_element(u.begin(), u.end());

    // Monotone step bound per cell: dt <= vol_i dr / sum_faces(area c)
    auto const targets = merged_targets(initial.t, T, options.snapshot_times);
    double t = initial.t;
    std::size_t next = 0;
    while (next < targets.size())
    {
        if (out.steps >= options.max_steps)
        {
            throw PdeAbort("step budget exhausted at t = " + format_double(t));
        }
        conductance(t, u, kappa, sens);
        double rate = 0;
        double max_sens = 0;
        for (std::size_t i = 0; i < M; ++i)
        {
            double const outflow
                = g.areas[i] * sens[i] + g.areas[i + 1] * sens[i + 1];
            rate = std::max(rate, outflow / (g.volumes[i] * dr));
            max_sens = std::max(max_sens, sens[i + 1]);
        }
        double dt = options.max_dt;
        if (rate > 0)
        {
            dt = std::min(dt, options.cfl / rate);
        }
        double const eps = std::numeric_limits<double>::epsilon();
        dt = std::min(dt, options.cfl * dr * dr / (max_sens + eps));
        double const target = targets[next];
        bool hit = false;
        if (t + dt >= target - 1e-14 * std::max(1.0, std::fabs(target)))
        {
            dt = target - t;
            hit = true;
        }
        if (rate * dt > 1 + 1e-12)
        {
            std::ostringstream os;
            os << "CFL violation: rate*dt = " << rate * dt << " at t = " << t;
            throw PdeAbort(os.str());
        }

        for (std::size_t j = 1; j < M; ++j)
        {
            flux[j] = g.areas[j] * kappa[j] * (u[j] - u[j - 1]) / dr;
        }
        double mass = 0;
        for (std::size_t i = 0; i < M; ++i)
        {
            double v = u[i] + dt * (flux[i + 1] - flux[i]) / g.volumes[i];
            if (v < 0)
            {
                if (v < options.negative_abort)
                {
                    std::ostringstream os;
                    os << "negative cell value " << v << " in cell " << i
                       << " (r = " << g.centers[i] << ") at t = " << t + dt;
                    throw PdeAbort(os.str());
                }
                if (out.clip_log.size() < clip_log_limit)
                {
                    std::ostringstream os;
                    os << "clipped " << v << " in cell " << i << " at t = " << t + dt;
                    out.clip_log.push_back(os.str());
                }
                out.min_value = std::min(out.min_value, v);
                v = 0;
            }
            u[i] = v;
            mass += v * g.volumes[i];
        }
        out.max_mass_drift
            = std::max(out.max_mass_drift, std::fabs(mass - mass0) / mass_scale);
        ++out.steps;
        t = hit ? target : t + dt;
        if (hit)
        {
            out.snapshots.push_back({initial.grid, t, u});
            ++next;
        }
    }
    for (auto const& s : out.snapshots)
    {
        out.min_value = std::min(out.min_value, *std::min_element(s.u.begin(), s.u.end()));
    }
    return out;
}

//---------------------------------------------------------------------------//
}  // namespace

//---------------------------------------------------------------------------//
GridPtr RadialGrid::uniform(int d, std::size_t cells, double r_max)
{
    if (d < 1 || cells < 2 || !(r_max > 0))
    {
        throw std::invalid_argument("radial grid needs d >= 1, M >= 2, r_max > 0");
    }
    auto g = std::make_shared<RadialGrid>();
    g->d = d;
    g->cells = cells;
    g->r_max = r_max;
    g->dr = r_max / static_cast<double>(cells);
    double const sigma = unit_sphere_area(d);
    g->faces.resize(cells + 1);
    g->areas.resize(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j)
    {
        g->faces[j] = j == cells ? r_max : g->dr * static_cast<double>(j);
        g->areas[j] = j == 0 ? 0.0 : sigma * std::pow(g->faces[j], d - 1);
    }
    g->centers.resize(cells);
    g->volumes.resize(cells);
    for (std::size_t i = 0; i < cells; ++i)
    {
        g->centers[i] = 0.5 * (g->faces[i] + g->faces[i + 1]);
        g->volumes[i] = sigma
                        * (std::pow(g->faces[i + 1], d) - std::pow(g->faces[i], d))
                        / d;
    }
    return g;
}

double RadialState::mass() const
{
    double m = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        m += u[i] * grid->volumes[i];
    }
    return m;
}

RadialState const& PdeTrajectory::at(double t) const
{
    for (auto const& s : snapshots)
    {
        if (std::fabs(s.t - t) <= 1e-12 * std::max(1.0, std::fabs(t)))
        {
            return s;
        }
    }
    throw std::out_of_range("no PDE snapshot at t = " + format_double(t));
}

//---------------------------------------------------------------------------//
RadialState barenblatt_state(BarenblattParams const& params, GridPtr grid, double s,
                             double t)
{
    if (!grid || grid->d != params.d)
    {
        throw std::invalid_argument("grid dimension must equal d");
    }
    RadialState out{grid, t, std::vector<double>(grid->cells)};
    double lower = 0;
    for (std::size_t i = 0; i < grid->cells; ++i)
    {
        double const upper = analytic_radial_cdf(params, s, grid->faces[i + 1]);
        out.u[i] = (upper - lower) / grid->volumes[i];
        lower = upper;
    }
    return out;
}

double l1_distance(RadialState const& a, RadialState const& b)
{
    require_state(a);
    require_state(b);
    if (a.grid->cells != b.grid->cells || a.grid->r_max != b.grid->r_max)
    {
        throw std::invalid_argument("L1 distance needs a common grid");
    }
    double sum = 0;
    for (std::size_t i = 0; i < a.u.size(); ++i)
    {
        sum += std::fabs(a.u[i] - b.u[i]) * a.grid->volumes[i];
    }
    return sum;
}

double numerical_support_radius(RadialState const& state, double threshold)
{
    for (std::size_t i = state.u.size(); i-- > 0;)
    {
        if (state.u[i] > threshold)
        {
            return state.grid->centers[i];
        }
    }
    return 0;
}

//---------------------------------------------------------------------------//
PdeTrajectory solve_plaplace(RadialState const& initial, double p, double T,
                             PdeOptions const& options)
{
    if (!(p > 2))
    {
        throw std::invalid_argument("p-Laplace solver needs p > 2");
    }
    require_state(initial);
    double const dr = initial.grid->dr;
    std::size_t const M = initial.grid->cells;
    double const power = p - 2;
    double const rounded = std::round(power);
    int const int_power = (rounded == power && power <= 8) ? static_cast<int>(rounded) : -1;
    auto conductance = [&](double, std::vector<double> const& u,
                           std::vector<double>& kappa, std::vector<double>& sens) {
        for (std::size_t j = 1; j < M; ++j)
        {
            double const grad = std::fabs(u[j] - u[j - 1]) / dr;
            double k;
            if (int_power >= 0)
            {
                k = 1;
                for (int e = 0; e < int_power; ++e)
                {
                    k *= grad;
                }
            }
            else
            {
                k = std::pow(grad, power);
            }
            kappa[j] = k;
            sens[j] = (p - 1) * k;
        }
    };
    return march(initial, T, options, conductance);
}

//---------------------------------------------------------------------------//
PdeTrajectory solve_linearized_fpe(RadialState const& initial,
                                   BarenblattParams const& params, double delta,
                                   double T, PdeOptions const& options)
{
    if (!(delta > 0))
    {
        throw std::invalid_argument("linearized solver needs delta > 0");
    }
    require_state(initial);
    if (!(initial.t + delta > 0))
    {
        throw std::invalid_argument("physical time t + delta must be positive");
    }
    RadialGrid const& g = *initial.grid;
    std::size_t const M = g.cells;
    // Radial powers at the faces; only the time factors change per step
    std::vector<double> face_root(M + 1);
    std::vector<double> face_lift(M + 1);
    double const m = params.radius_power();
    double const lift = (params.p - 2) / (params.p - 1);
    for (std::size_t j = 0; j <= M; ++j)
    {
        face_root[j] = std::pow(g.faces[j], m);
        face_lift[j] = std::pow(g.faces[j], lift);
    }
    double const constant = std::pow(params.q * params.p / (params.p - 2), params.p - 2);
    auto conductance = [&](double t, std::vector<double> const&,
                           std::vector<double>& kappa, std::vector<double>& sens) {
        double const s = t + delta;
        double const amp = constant * std::pow(s, params.diffusion_time_exponent());
        double const tau = params.q * std::pow(s, -params.radius_time_exponent());
        for (std::size_t j = 1; j < M; ++j)
        {
            double const gj = params.C1 - tau * face_root[j];
            double const k = gj > 0 ? amp * gj * face_lift[j] : 0.0;
            kappa[j] = k;
            sens[j] = k;
        }
    };
    return march(initial, T, options, conductance);
}

//---------------------------------------------------------------------------//
OperatorForms discrete_operator_forms(RadialGrid const& grid,
                                      std::vector<double> const& u,
                                      ScalarFn const& a, ScalarFn const& a_prime)
{
    std::size_t const M = grid.cells;
    if (u.size() != M)
    {
        throw std::invalid_argument("profile does not match the grid");
    }
    double const dr = grid.dr;
    std::vector<double> a_cell(M);
    for (std::size_t i = 0; i < M; ++i)
    {
        a_cell[i] = a(grid.centers[i]);
    }
    std::vector<double> flux_div(M + 1, 0.0);
    std::vector<double> flux_fp(M + 1, 0.0);
    for (std::size_t j = 1; j < M; ++j)
    {
        double const r = grid.faces[j];
        double const du = (u[j] - u[j - 1]) / dr;
        flux_div[j] = grid.areas[j] * a(r) * du;
        double const dau = (a_cell[j] * u[j] - a_cell[j - 1] * u[j - 1]) / dr;
        double const ubar = 0.5 * (u[j] + u[j - 1]);
        flux_fp[j] = grid.areas[j] * (dau - ubar * a_prime(r));
    }
    OperatorForms out;
    out.divergence.resize(M);
    out.fokker_planck.resize(M);
    for (std::size_t i = 0; i < M; ++i)
    {
        out.divergence[i] = (flux_div[i + 1] - flux_div[i]) / grid.volumes[i];
        out.fokker_planck[i] = (flux_fp[i + 1] - flux_fp[i]) / grid.volumes[i];
    }
    return out;
}

//---------------------------------------------------------------------------//
VerificationReport class_membership_check(std::vector<RadialState> const& candidate,
                                          BarenblattParams const& params,
                                          double delta, double C, double tol)
{
    VerificationReport report;
    report.check = "class_membership";
    report.params = report_params(params, delta, Point(params.d, 0.0));
    std::ostringstream inputs;
    inputs << to_json_string(params) << ";delta=" << format_double(delta)
           << ";C=" << format_double(C) << ";snapshots=" << candidate.size();
    report.inputs_digest = digest_hex(inputs.str());

    double c_min = 0;
    double mass_dev = 0;
    for (auto const& state : candidate)
    {
        require_state(state);
        RadialState const ref
            = barenblatt_state(params, state.grid, state.t + delta, state.t);
        for (std::size_t i = 0; i < state.u.size(); ++i)
        {
            if (state.u[i] <= tol)
            {
                continue;
            }
            if (!(ref.u[i] > 0))
            {
                c_min = std::numeric_limits<double>::infinity();
                report.notes.push_back("mass outside the support of w_delta at t = "
                                       + format_double(state.t) + ", r = "
                                       + format_double(state.grid->centers[i]));
                break;
            }
            c_min = std::max(c_min, state.u[i] / ref.u[i]);
        }
        mass_dev = std::max(mass_dev, std::fabs(state.mass() - 1));
    }
    report.add("min_C", c_min, C);
    report.add("mass_deviation", mass_dev, 1e-8);
    return report;
}

//---------------------------------------------------------------------------//
}  // namespace pbm
