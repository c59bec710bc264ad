// SPDX-License-Identifier: Apache-2.0
//! \file sde.cpp
#include "pbm/sde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "pbm/radial_cdf.hpp"
#include "pbm/rng.hpp"

namespace pbm
{
namespace
{
//---------------------------------------------------------------------------//
constexpr double grid_tolerance = 1e-6;

std::int64_t checked_ratio(double step, double noise_step)
{
    double const ratio = step / noise_step;
    auto const n = std::llround(ratio);
    if (n < 1 || std::fabs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
    {
        throw std::invalid_argument(
            "step must be an integer multiple of the noise step");
    }
    return n;
}

unsigned worker_count(SimConfig const& config, std::size_t paths)
{
    unsigned w = config.workers;
    if (w == 0)
    {
        w = std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(paths, 1)));
}

struct StepPlan
{
    std::int64_t first{};
    std::int64_t last{};
    std::vector<std::int64_t> snapshot_steps;
};

StepPlan make_plan(SimConfig const& config, double start)
{
    StepPlan plan;
    plan.first = config.step_index(start);
    plan.last = config.step_index(config.horizon);
    if (plan.last < plan.first)
    {
        throw std::invalid_argument("horizon precedes the start time");
    }
    if (config.record_paths)
    {
        for (auto n = plan.first; n <= plan.last; ++n)
        {
            plan.snapshot_steps.push_back(n);
        }
        return plan;
    }
    plan.snapshot_steps.push_back(plan.first);
    for (double t : config.snapshot_times)
    {
        auto n = config.step_index(t);
        if (n >= plan.first && n <= plan.last)
        {
            plan.snapshot_steps.push_back(n);
        }
    }
    plan.snapshot_steps.push_back(plan.last);
    std::sort(plan.snapshot_steps.begin(), plan.snapshot_steps.end());
    plan.snapshot_steps.erase(
        std::unique(plan.snapshot_steps.begin(), plan.snapshot_steps.end()),
        plan.snapshot_steps.end());
    return plan;
}

//---------------------------------------------------------------------------//
/*!
 * Advance paths [begin, end) through the plan. Each path is independent; its
 * noise at grid step n is addressed by (seed, stream, fine index), so the
 * result does not depend on how paths are split among workers.
 */
void advance_range(SimConfig const& config,
                   StepPlan const& plan,
                   std::vector<CoefficientSlice> const& slices,
                   std::vector<double> const& initial,
                   std::vector<std::uint64_t> const& ids,
                   std::vector<std::vector<double>>& snapshots,
                   std::size_t begin,
                   std::size_t end)
{
    auto const d = static_cast<std::size_t>(config.params.d);
    double const h = config.step;
    double const fine = config.effective_noise_step();
    std::int64_t const ratio = checked_ratio(h, fine);
    double const sqrt_fine = std::sqrt(fine);
    double const sigma_scale
        = config.convention == DiffusionConvention::standard ? 2.0 : 1.0;
    double const cap = config.drift_cap;
    auto const blocks_per_draw = static_cast<std::uint64_t>((d + 1) / 2);
    std::span<double const> y = config.center;

    std::vector<double> x(d);
    std::vector<double> dw(d);
    std::vector<double> xi(d);
    for (std::size_t path = begin; path < end; ++path)
    {
        std::copy_n(initial.begin() + static_cast<std::ptrdiff_t>(path * d), d, x.begin());
        RngStream rng(config.seed,
                      make_stream_id(ids[path], StreamPurpose::noise, config.generation));
        std::size_t next_snap = 0;
        auto record = [&] {
            std::copy(x.begin(), x.end(),
                      snapshots[next_snap].begin() + static_cast<std::ptrdiff_t>(path * d));
            ++next_snap;
        };
        if (plan.snapshot_steps[0] == plan.first)
        {
            record();
        }
        for (std::int64_t n = plan.first; n < plan.last; ++n)
        {
            CoefficientSlice const& slice = slices[static_cast<std::size_t>(n - plan.first)];
            double r2 = 0;
            for (std::size_t j = 0; j < d; ++j)
            {
                double const off = x[j] - y[j];
                r2 += off * off;
            }
            double const r = std::sqrt(r2);
            // Zero coefficients outside the support and at the center
            if (r > 0 && r <= slice.radius())
            {
                auto const [a, B] = slice.evaluate(r);
                double const tamed = B / (1 + h * std::fabs(B) * r / cap);
                double const noise_amp = std::sqrt(sigma_scale * a);
                if (a > 0)
                {
                    std::fill(dw.begin(), dw.end(), 0.0);
                    auto const fine_index = static_cast<std::uint64_t>(n * ratio);
                    for (std::int64_t j = 0; j < ratio; ++j)
                    {
                        rng.seek((fine_index + static_cast<std::uint64_t>(j)) * blocks_per_draw);
                        rng.normals(xi);
                        for (std::size_t c = 0; c < d; ++c)
                        {
                            dw[c] += xi[c];
                        }
                    }
                    for (std::size_t c = 0; c < d; ++c)
                    {
                        x[c] += tamed * (x[c] - y[c]) * h + noise_amp * sqrt_fine * dw[c];
                    }
                }
                else
                {
                    for (std::size_t c = 0; c < d; ++c)
                    {
                        x[c] += tamed * (x[c] - y[c]) * h;
                    }
                }
                for (std::size_t c = 0; c < d; ++c)
                {
                    if (!std::isfinite(x[c]))
                    {
                        std::ostringstream os;
                        os << "non-finite position at radius " << r
                           << ", time " << slice.time() - config.delta0;
                        throw NumericalAbort(path, n, os.str());
                    }
                }
            }
            if (next_snap < plan.snapshot_steps.size()
                && plan.snapshot_steps[next_snap] == n + 1)
            {
                record();
            }
        }
    }
}

//---------------------------------------------------------------------------//
PathEnsemble run(SimConfig const& config,
                 double start,
                 std::vector<double> initial,
                 std::vector<std::uint64_t> ids)
{
    auto const d = static_cast<std::size_t>(config.params.d);
    if (initial.size() != ids.size() * d)
    {
        throw std::invalid_argument("positions and path ids do not match");
    }
    StepPlan plan = make_plan(config, start);

    std::vector<CoefficientSlice> slices;
    slices.reserve(static_cast<std::size_t>(plan.last - plan.first));
    for (auto n = plan.first; n < plan.last; ++n)
    {
        double const t = config.t0 + static_cast<double>(n) * config.step;
        slices.emplace_back(config.params, t + config.delta0);
    }

    PathEnsemble out;
    out.config = config;
    out.start_time = start;
    out.path_ids = std::move(ids);
    for (auto n : plan.snapshot_steps)
    {
        out.times.push_back(config.t0 + static_cast<double>(n) * config.step);
    }
    out.positions.assign(plan.snapshot_steps.size(),
                         std::vector<double>(initial.size()));

    std::size_t const n_paths = out.path_ids.size();
    unsigned const workers = worker_count(config, n_paths);
    if (workers <= 1)
    {
        advance_range(config, plan, slices, initial, out.path_ids, out.positions, 0, n_paths);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    std::size_t const chunk = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w)
    {
        std::size_t const b = std::min(n_paths, w * chunk);
        std::size_t const e = std::min(n_paths, b + chunk);
        threads.emplace_back([&, w, b, e] {
            try
            {
                advance_range(config, plan, slices, initial, out.path_ids, out.positions, b, e);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
    {
        t.join();
    }
    for (auto& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
}  // namespace

//---------------------------------------------------------------------------//
NumericalAbort::NumericalAbort(std::size_t path, std::int64_t step,
                               std::string const& detail)
    : std::runtime_error("numerical abort on path " + std::to_string(path)
                         + " at step " + std::to_string(step) + ": " + detail)
    , path_(path)
    , step_(step)
{
}

//---------------------------------------------------------------------------//
void SimConfig::validate() const
{
    if (center.size() != static_cast<std::size_t>(params.d))
    {
        throw std::invalid_argument("center dimension must equal d");
    }
    if (!(step > 0) || !std::isfinite(step))
    {
        throw std::invalid_argument("step size h must be positive");
    }
    if (!(delta0 >= 0) || !(t0 >= 0))
    {
        throw std::invalid_argument("delta0 and t0 must be >= 0");
    }
    if (!(t0 + delta0 > 0))
    {
        throw std::invalid_argument(
            "a Dirac start (delta0 = 0) needs a warm-start time t0 > 0");
    }
    if (!(horizon >= t0))
    {
        throw std::invalid_argument("horizon T must be >= t0");
    }
    if (paths < 1)
    {
        throw std::invalid_argument("path count must be >= 1");
    }
    if (!(drift_cap > 0))
    {
        throw std::invalid_argument("drift cap must be positive");
    }
    if (noise_step < 0)
    {
        throw std::invalid_argument("noise step must be >= 0");
    }
    checked_ratio(step, effective_noise_step());
    auto const last = step_index(horizon);
    for (double t : snapshot_times)
    {
        if (t < t0 - grid_tolerance * step || step_index(t) > last)
        {
            throw std::invalid_argument("snapshot time outside [t0, T]");
        }
    }
}

std::int64_t SimConfig::step_index(double t) const
{
    double const x = (t - t0) / step;
    auto const n = std::llround(x);
    if (n < 0 || std::fabs(x - static_cast<double>(n)) > grid_tolerance)
    {
        throw std::invalid_argument("time " + format_double(t)
                                    + " is not on the step grid t0 + n h");
    }
    return n;
}

//---------------------------------------------------------------------------//
std::size_t PathEnsemble::snapshot_index(double t) const
{
    for (std::size_t k = 0; k < times.size(); ++k)
    {
        if (std::fabs(times[k] - t) <= grid_tolerance * config.step)
        {
            return k;
        }
    }
    throw std::out_of_range("no snapshot at time " + format_double(t));
}

std::vector<double> PathEnsemble::radii(std::size_t snapshot,
                                        std::span<double const> center) const
{
    auto const d = static_cast<std::size_t>(dim());
    auto const& pos = positions.at(snapshot);
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        double r2 = 0;
        for (std::size_t j = 0; j < d; ++j)
        {
            double const off = pos[i * d + j] - center[j];
            r2 += off * off;
        }
        out[i] = std::sqrt(r2);
    }
    return out;
}

//---------------------------------------------------------------------------//
PathEnsemble simulate(SimConfig const& config)
{
    config.validate();
    auto const d = static_cast<std::size_t>(config.params.d);
    RadialCdf cdf(config.params, config.t0 + config.delta0);
    std::vector<double> initial(config.paths * d);
    std::vector<std::uint64_t> ids(config.paths);
    for (std::size_t i = 0; i < config.paths; ++i)
    {
        ids[i] = i;
        RngStream rng(config.seed,
                      make_stream_id(i, StreamPurpose::initial, config.generation));
        sample_barenblatt_point(
            cdf, config.center, rng,
            std::span<double>(initial).subspan(i * d, d));
    }
    return run(config, config.t0, std::move(initial), std::move(ids));
}

PathEnsemble simulate_from(SimConfig const& config,
                           double start,
                           std::vector<double> positions,
                           std::vector<std::uint64_t> path_ids)
{
    config.validate();
    if (start < config.t0 - grid_tolerance * config.step
        || config.step_index(start) > config.step_index(config.horizon))
    {
        throw std::invalid_argument("start time outside [t0, T]");
    }
    return run(config, start, std::move(positions), std::move(path_ids));
}

PathEnsemble restart(PathEnsemble const& ensemble,
                     std::size_t snapshot,
                     double new_horizon,
                     RestartStreams streams)
{
    double const start = ensemble.times.at(snapshot);
    if (new_horizon < start - grid_tolerance * ensemble.config.step)
    {
        throw std::invalid_argument("restart horizon precedes restart time");
    }
    SimConfig config = ensemble.config;
    config.horizon = new_horizon;
    config.record_paths = false;
    std::vector<double> snaps{start, new_horizon};
    for (double t : ensemble.config.snapshot_times)
    {
        if (t > start && t < new_horizon)
        {
            snaps.push_back(t);
        }
    }
    std::sort(snaps.begin(), snaps.end());
    config.snapshot_times = std::move(snaps);
    if (streams == RestartStreams::fresh)
    {
        config.generation += 1;
    }
    return simulate_from(config, start, ensemble.positions[snapshot], ensemble.path_ids);
}

EmpiricalCdf empirical_radial_cdf(PathEnsemble const& ensemble,
                                  std::size_t snapshot,
                                  std::span<double const> center)
{
    return EmpiricalCdf(ensemble.radii(snapshot, center));
}

//---------------------------------------------------------------------------//
VerificationReport conditional_consistency_test(PathEnsemble const& ensemble,
                                                std::size_t r_snapshot,
                                                std::size_t t_snapshot,
                                                ConsistencyOptions const& options)
{
    SimConfig const& cfg = ensemble.config;
    double const r_time = ensemble.times.at(r_snapshot);
    double const t_time = ensemble.times.at(t_snapshot);
    if (!(r_time < t_time))
    {
        throw std::invalid_argument("conditional test needs r < t");
    }
    if (options.bins < 1)
    {
        throw std::invalid_argument("conditional test needs at least one bin");
    }
    auto const d = static_cast<std::size_t>(cfg.params.d);
    double const radius = support_radius(cfg.params, r_time + cfg.delta0);
    auto const r_radii = ensemble.radii(r_snapshot);
    auto const t_radii = ensemble.radii(t_snapshot);

    std::vector<std::vector<std::size_t>> members(options.bins);
    for (std::size_t i = 0; i < r_radii.size(); ++i)
    {
        auto bin = static_cast<std::size_t>(r_radii[i] / radius
                                            * static_cast<double>(options.bins));
        members[std::min(bin, options.bins - 1)].push_back(i);
    }

    SimConfig fresh = cfg;
    fresh.horizon = t_time;
    fresh.snapshot_times = {r_time, t_time};
    fresh.record_paths = false;
    if (options.streams == RestartStreams::fresh)
    {
        fresh.generation += 1;
    }

    VerificationReport report;
    report.check = "markov_conditional_consistency";
    report.params = report_params(cfg.params, cfg.delta0, cfg.center);
    report.seed = cfg.seed;
    std::ostringstream inputs;
    inputs << to_json_string(cfg.params) << ";r=" << format_double(r_time)
           << ";t=" << format_double(t_time) << ";bins=" << options.bins
           << ";N=" << ensemble.size() << ";shift_bin=" << options.shifted_bin;
    report.inputs_digest = digest_hex(inputs.str());

    for (std::size_t b = 0; b < options.bins; ++b)
    {
        auto const& idx = members[b];
        std::string const name = "bin" + std::to_string(b) + "_ks";
        if (idx.size() < options.min_count)
        {
            report.notes.push_back(name + " skipped: " + std::to_string(idx.size())
                                   + " paths < " + std::to_string(options.min_count));
            continue;
        }
        std::vector<double> start(idx.size() * d);
        std::vector<std::uint64_t> ids(idx.size());
        std::vector<double> direct(idx.size());
        bool const shifted = options.shifted_bin == static_cast<long>(b);
        for (std::size_t j = 0; j < idx.size(); ++j)
        {
            auto const pos = ensemble.position(r_snapshot, idx[j]);
            double const rr = r_radii[idx[j]];
            for (std::size_t c = 0; c < d; ++c)
            {
                double v = pos[c];
                if (shifted && rr > 0)
                {
                    v = cfg.center[c] + (pos[c] - cfg.center[c]) * (rr + options.shift) / rr;
                }
                start[j * d + c] = v;
            }
            ids[j] = ensemble.path_ids[idx[j]];
            direct[j] = t_radii[idx[j]];
        }
        PathEnsemble again = simulate_from(fresh, r_time, std::move(start), std::move(ids));
        EmpiricalCdf lhs(std::move(direct));
        EmpiricalCdf rhs(again.radii(again.times.size() - 1));
        report.add(name, ks_two_sample(lhs, rhs),
                   ks_critical_two_sample(lhs.size(), rhs.size()));
    }
    return report;
}

//---------------------------------------------------------------------------//
}  // namespace pbm
