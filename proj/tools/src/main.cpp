// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file main.cpp
//! casimir validate|scan|spectral|bound --config <path> [--seed N] [--out-dir <path>]
#include <iostream>

#include <CLI11.hpp>

#include "casimir/cli/commands.hpp"

int main(int argc, char** argv)
{
    using namespace casimir::cli;

    CLI::App app{"World-line Monte Carlo for the Casimir piston in a flask"};
    app.set_version_flag("--version", version_tag());

    CommandLine cl;
    std::uint64_t seed = 0;
    std::string config;
    std::string out_dir = ".";
    app.add_option("command", cl.command, "validate, scan, spectral or bound")
        ->required()
        ->check(CLI::IsMember({"validate", "scan", "spectral", "bound"}));
    app.add_option("--config", config, "Run configuration (key = value lines)")->required();
    auto* seed_opt = app.add_option("--seed", seed, "Override mc.seed");
    app.add_option("--out-dir", out_dir, "Directory for relative output paths");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const& e)
    {
        return app.exit(e);
    }
    catch (CLI::CallForVersion const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return exit_config_error;
    }

    cl.config = config;
    cl.out_dir = out_dir;
    if (*seed_opt)
    {
        cl.seed = seed;
    }
    return run(cl, std::cout, std::cerr);
}
