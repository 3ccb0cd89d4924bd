// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/cli/commands.hpp
//! Subcommands of the casimir tool.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace casimir::cli
{
enum ExitCode : int
{
    exit_ok = 0,
    exit_check_failed = 1,
    exit_config_error = 2,
    exit_io_error = 3,
};

struct CommandLine
{
    std::string command;  //!< validate, scan, spectral or bound
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;  //!< overrides mc.seed
    std::filesystem::path out_dir{"."};
};

//! Load the config, run the command and map failures to exit codes.
//! Diagnostics go to `err`, results to `out`.
int run(CommandLine const& cl, std::ostream& out, std::ostream& err);

int cmd_validate(RunConfig const& config, std::ostream& out);
int cmd_scan(RunConfig const& config, std::filesystem::path const& out_dir, std::ostream& out);
int cmd_spectral(RunConfig const& config, std::ostream& out);
int cmd_bound(RunConfig const& config, std::ostream& out);

//! Scan plus the optional N-doubling study (n_points / 2 and 2 n_points).
ScanStudy run_scan_study(RunConfig const& config);

}  // namespace casimir::cli
