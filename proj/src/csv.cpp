// SPDX-License-Identifier: Apache-2.0
//! \file csv.cpp
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pbm/io.hpp"
#include "pbm/params.hpp"

namespace pbm
{
namespace
{
void append(std::string& out, double v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    out.append(buf, ec == std::errc{} ? end : buf);
}

void append(std::string& out, std::uint64_t v)
{
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ec == std::errc{} ? end : buf);
}

char const* convention_name(DiffusionConvention c)
{
    return c == DiffusionConvention::standard ? "standard" : "literal";
}
}  // namespace

//---------------------------------------------------------------------------//
void write_ensemble_csv(std::ostream& os, PathEnsemble const& ensemble)
{
    auto const d = static_cast<std::size_t>(ensemble.dim());
    std::string line = "t,path_id";
    for (std::size_t c = 0; c < d; ++c)
    {
        line += ",x" + std::to_string(c + 1);
    }
    line += '\n';
    os << line;
    for (std::size_t k = 0; k < ensemble.times.size(); ++k)
    {
        std::string t;
        append(t, ensemble.times[k]);
        std::string block;
        block.reserve(1 << 20);
        for (std::size_t i = 0; i < ensemble.size(); ++i)
        {
            block += t;
            block += ',';
            append(block, ensemble.path_ids[i]);
            for (double x : ensemble.position(k, i))
            {
                block += ',';
                append(block, x);
            }
            block += '\n';
            if (block.size() > (1 << 20) - 256)
            {
                os << block;
                block.clear();
            }
        }
        os << block;
    }
}

void write_trajectory_csv(std::ostream& os, std::vector<RadialState> const& snapshots)
{
    os << "t,r,u\n";
    std::string block;
    for (auto const& s : snapshots)
    {
        for (std::size_t i = 0; i < s.u.size(); ++i)
        {
            append(block, s.t);
            block += ',';
            append(block, s.grid->centers[i]);
            block += ',';
            append(block, s.u[i]);
            block += '\n';
        }
        os << block;
        block.clear();
    }
}

nlohmann::json ensemble_sidecar(SimConfig const& c)
{
    nlohmann::json config = {
        {"params", nlohmann::json::parse(to_json_string(c.params))},
        {"center", c.center},
        {"delta0", c.delta0},
        {"t0", c.t0},
        {"horizon", c.horizon},
        {"step", c.step},
        {"noise_step", c.effective_noise_step()},
        {"drift_cap", c.drift_cap},
        {"paths", c.paths},
        {"generation", c.generation},
        {"snapshot_times", c.snapshot_times},
        {"convention", convention_name(c.convention)},
    };
    return {{"config", config}, {"seed", c.seed}, {"code_version", code_version}};
}

nlohmann::json trajectory_sidecar(RadialGrid const& grid, std::string const& kind,
                                  double cfl, std::size_t steps)
{
    return {
        {"grid",
         {{"d", grid.d}, {"cells", grid.cells}, {"r_max", grid.r_max}, {"dr", grid.dr}}},
        {"scheme",
         {{"kind", kind},
          {"method", "explicit conservative finite volume, two-point face gradient"},
          {"cfl", cfl},
          {"steps", steps}}},
        {"code_version", code_version},
    };
}

//---------------------------------------------------------------------------//
std::filesystem::path default_output_root()
{
    char const* env = std::getenv(output_root_variable);
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("pbm-out");
}

void prepare_output_dir(std::filesystem::path const& dir, bool force)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(dir, ec))
    {
        if (!fs::is_directory(dir, ec))
        {
            throw ConfigError("output path exists and is not a directory: " + dir.string());
        }
        if (!fs::is_empty(dir, ec) && !force)
        {
            throw ConfigError("output directory is not empty (use --force to overwrite): "
                              + dir.string());
        }
        return;
    }
    fs::create_directories(dir, ec);
    if (ec)
    {
        throw ConfigError("cannot create output directory " + dir.string() + ": "
                          + ec.message());
    }
}

void write_text(std::filesystem::path const& file, std::string const& text)
{
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    os << text;
    if (!os)
    {
        throw std::runtime_error("cannot write " + file.string());
    }
}

std::string read_text(std::filesystem::path const& file)
{
    std::ifstream is(file, std::ios::binary);
    if (!is)
    {
        throw ConfigError("cannot read " + file.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string dump_json(nlohmann::json const& j)
{
    return j.dump(2) + "\n";
}

//---------------------------------------------------------------------------//
}  // namespace pbm
