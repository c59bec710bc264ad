// SPDX-License-Identifier: Apache-2.0
//! \file report.cpp
#include "pbm/report.hpp"

#include <cmath>
#include <cstdio>

namespace pbm
{
//---------------------------------------------------------------------------//
bool Statistic::pass() const
{
    if (std::isnan(value))
    {
        return false;
    }
    switch (bound)
    {
        case Bound::at_most:
            return value <= tol;
        case Bound::at_least:
            return value >= tol;
        case Bound::below:
            return value < tol;
        case Bound::above:
            return value > tol;
    }
    return false;
}

bool VerificationReport::pass() const
{
    if (stats.empty())
    {
        return false;
    }
    for (auto const& s : stats)
    {
        if (!s.pass())
        {
            return false;
        }
    }
    return true;
}

Statistic const* VerificationReport::find(std::string_view name) const
{
    for (auto const& s : stats)
    {
        if (s.name == name)
        {
            return &s;
        }
    }
    return nullptr;
}

ReportParams report_params(BarenblattParams const& params, double delta,
                           Point const& y)
{
    return {params.d, params.p, delta, y};
}

//---------------------------------------------------------------------------//
std::string digest_hex(std::string_view text)
{
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text)
    {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

//---------------------------------------------------------------------------//
nlohmann::json to_json(Statistic const& stat)
{
    nlohmann::json j;
    j["name"] = stat.name;
    j["value"] = stat.value;
    j["tol"] = stat.tol;
    switch (stat.bound)
    {
        case Bound::at_most:
            j["bound"] = "max";
            break;
        case Bound::at_least:
            j["bound"] = "min";
            break;
        case Bound::below:
            j["bound"] = "below";
            break;
        case Bound::above:
            j["bound"] = "above";
            break;
    }
    j["pass"] = stat.pass();
    return j;
}

nlohmann::json to_json(VerificationReport const& report)
{
    nlohmann::json j;
    j["check"] = report.check;
    j["params"] = {{"d", report.params.d},
                   {"p", report.params.p},
                   {"delta", report.params.delta},
                   {"y", report.params.y}};
    j["stats"] = nlohmann::json::array();
    for (auto const& s : report.stats)
    {
        j["stats"].push_back(to_json(s));
    }
    j["seed"] = report.seed;
    j["inputs_digest"] = report.inputs_digest;
    j["notes"] = report.notes;
    j["pass"] = report.pass();
    return j;
}

//---------------------------------------------------------------------------//
}  // namespace pbm
