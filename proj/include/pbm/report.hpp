// SPDX-License-Identifier: Apache-2.0
//! \file pbm/report.hpp
//! Structured pass/fail records shared by every checker.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "barenblatt.hpp"

namespace pbm
{
//---------------------------------------------------------------------------//
enum class Bound
{
    at_most,  //!< pass iff value <= tol
    at_least,  //!< pass iff value >= tol (fault-injection and discrimination)
    below,     //!< pass iff value < tol
    above      //!< pass iff value > tol
};

struct Statistic
{
    std::string name;
    double value{};
    double tol{};
    Bound bound{Bound::at_most};

    bool pass() const;
};

struct ReportParams
{
    int d{};
    double p{};
    double delta{};
    Point y;
};

/*!
 * Outcome of one verification check.
 *
 * A report passes iff it holds at least one statistic and every statistic is
 * within its tolerance. Serialization carries no wall-clock data, so equal
 * inputs give byte-identical JSON.
 */
struct VerificationReport
{
    std::string check;
    ReportParams params;
    std::vector<Statistic> stats;
    std::uint64_t seed{};
    std::vector<std::string> notes;
    std::string inputs_digest;

    void add(std::string name, double value, double tol, Bound bound = Bound::at_most)
    {
        stats.push_back({std::move(name), value, tol, bound});
    }
    bool pass() const;
    Statistic const* find(std::string_view name) const;
};

ReportParams report_params(BarenblattParams const& params,
                           double delta,
                           Point const& y);

// 64-bit FNV-1a digest as 16 hex characters
std::string digest_hex(std::string_view text);

nlohmann::json to_json(Statistic const& stat);
nlohmann::json to_json(VerificationReport const& report);

//---------------------------------------------------------------------------//
}  // namespace pbm
