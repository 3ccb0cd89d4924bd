// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file report.cpp
#include "casimir/cli/report.hpp"

#include <cstdio>

#ifndef CASIMIR_VERSION
#    define CASIMIR_VERSION "unknown"
#endif

namespace casimir::cli
{
namespace
{
void append_real(std::string& out, double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    out += buf;
}

nlohmann::ordered_json bracket_json(std::optional<Bracket> const& b)
{
    if (!b)
    {
        return nullptr;
    }
    return {{"a_lo", b->a_lo}, {"a_hi", b->a_hi}, {"a_star", b->a_star}};
}

}  // namespace

char const* version_tag()
{
    return "casimir " CASIMIR_VERSION;
}

std::string scan_csv(ScanResult const& scan)
{
    std::string out = csv_header;
    out += '\n';
    for (std::size_t k = 0; k < scan.heights.size(); ++k)
    {
        EnergyEstimate const& e = scan.energies[k];
        for (double v : {scan.heights[k], e.value, e.std_error, e.plus_component, e.minus_component})
        {
            append_real(out, v);
            out += ',';
        }
        out += std::to_string(e.n_plus) + ',' + std::to_string(e.n_minus) + ','
               + std::to_string(e.n_null) + ',' + (e.tail_warning ? '1' : '0') + '\n';
    }
    return out;
}

nlohmann::ordered_json scan_json(RunConfig const& config, ScanStudy const& study)
{
    using json = nlohmann::ordered_json;
    ScanResult const& scan = study.scan;

    json j;
    j["version"] = version_tag();
    j["command"] = "scan";
    j["seed"] = config.require_seed();
    j["config"] = config.echo;
    j["effective"] = {
        {"geometry", {{"R", study.system.bulb_radius},
                      {"r", study.system.neck_radius},
                      {"L", study.system.neck_length},
                      {"shape", config.geometry.shape == Shape::flask ? "flask" : "cylinder"}}},
        {"heights", scan.heights},
        {"ensemble", {{"seed", config.require_seed()},
                      {"n_loops", config.mc.n_loops},
                      {"n_points", config.mc.n_points}}},
        {"x_sampling", {{"mode", to_string(config.mc.x_sampling)},
                        {"samples_per_beta", config.mc.x_samples_per_beta}}},
        {"beta_grid", {{"n_beta", scan.grid.size()},
                       {"beta_min", scan.grid.nodes.front()},
                       {"beta_max", scan.grid.nodes.back()}}},
    };

    json rows = json::array();
    for (std::size_t k = 0; k < scan.heights.size(); ++k)
    {
        EnergyEstimate const& e = scan.energies[k];
        rows.push_back({{"a", scan.heights[k]},
                        {"E_int", e.value},
                        {"stderr", e.std_error},
                        {"E_plus", e.plus_component},
                        {"E_plus_stderr", e.plus_std_error},
                        {"E_minus", e.minus_component},
                        {"E_minus_stderr", e.minus_std_error},
                        {"n_plus", e.n_plus},
                        {"n_minus", e.n_minus},
                        {"n_null", e.n_null},
                        {"tail_flag", e.tail_warning}});
    }
    j["rows"] = std::move(rows);

    json forces = json::array();
    for (ForcePoint const& f : scan.forces)
    {
        forces.push_back({{"a", f.a}, {"F", f.value}, {"stderr", f.std_error}});
    }
    j["forces"] = std::move(forces);
    j["equilibrium"] = bracket_json(scan.equilibrium);

    json doubling = json::array();
    for (DoublingLevel const& level : study.doubling)
    {
        json energies = json::array();
        for (std::size_t k = 0; k < level.scan.heights.size(); ++k)
        {
            energies.push_back({{"a", level.scan.heights[k]},
                                {"E_int", level.scan.energies[k].value},
                                {"stderr", level.scan.energies[k].std_error}});
        }
        doubling.push_back({{"n_points", level.n_points},
                            {"rows", std::move(energies)},
                            {"equilibrium", bracket_json(level.scan.equilibrium)}});
    }
    j["doubling_study"] = std::move(doubling);
    j["warnings"] = study.warnings;
    return j;
}

}  // namespace casimir::cli
