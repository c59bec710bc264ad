// SPDX-License-Identifier: Apache-2.0
//! \file pbm/io.hpp
//! CSV and JSON artifacts and output-directory handling.
#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pde.hpp"
#include "sde.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
inline constexpr char code_version[] = "pbm 1.0.0";

//! Environment variable naming the default output root
inline constexpr char output_root_variable[] = "PBM_OUTPUT_ROOT";

//! Invalid flags, configuration or output location
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//---------------------------------------------------------------------------//
// Header t,path_id,x1..xd; one row per (snapshot, path)
void write_ensemble_csv(std::ostream& os, PathEnsemble const& ensemble);

// Header t,r,u; one row per (snapshot, cell) at cell centers
void write_trajectory_csv(std::ostream& os, std::vector<RadialState> const& snapshots);

// {config, seed, code_version}
nlohmann::json ensemble_sidecar(SimConfig const& config);

// {grid, scheme, code_version}
nlohmann::json trajectory_sidecar(RadialGrid const& grid, std::string const& kind,
                                  double cfl, std::size_t steps);

//---------------------------------------------------------------------------//
// $PBM_OUTPUT_ROOT or "pbm-out"
std::filesystem::path default_output_root();

// Create dir, or accept an existing empty one; a non-empty dir needs force
void prepare_output_dir(std::filesystem::path const& dir, bool force);

void write_text(std::filesystem::path const& file, std::string const& text);
std::string read_text(std::filesystem::path const& file);

// JSON with 2-space indentation and a trailing newline
std::string dump_json(nlohmann::json const& j);

//---------------------------------------------------------------------------//
}  // namespace pbm
