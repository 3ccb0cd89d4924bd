// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/cli/report.hpp
//! CSV and JSON renderings of scan results.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "casimir/interaction.hpp"
#include "config.hpp"

namespace casimir::cli
{
//! Version tag written into every JSON report.
char const* version_tag();

//! Fixed column order; new columns may only be appended.
inline constexpr char const* csv_header = "a,E_int,stderr,E_plus,E_minus,n_plus,n_minus,n_null,tail_flag";

//! One row per scan height, reals as %.16e (17 significant digits), LF
//! line endings.
std::string scan_csv(ScanResult const& scan);

//! Scan at another loop resolution, for the N-doubling study.
struct DoublingLevel
{
    std::size_t n_points{0};
    ScanResult scan;
};

struct ScanStudy
{
    FlaskSystem system;
    ScanResult scan;
    std::vector<DoublingLevel> doubling;
    std::vector<std::string> warnings;
};

/*!
 * Summary with the config echo, seed, version tag, effective parameters,
 * rows, forces, equilibrium bracket (or null) and doubling study. No wall
 * time, so identical inputs give identical bytes.
 */
nlohmann::ordered_json scan_json(RunConfig const& config, ScanStudy const& study);

}  // namespace casimir::cli
