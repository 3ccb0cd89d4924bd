// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/cli/config.hpp
//! Flat key = value run configuration.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "casimir/interaction.hpp"

namespace casimir::cli
{
//! Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Unreadable or unwritable file (exit code 3).
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/*!
 * Parsed run configuration.
 *
 * One `section.key = value` assignment per line; `#` starts a comment.
 * Lists are comma separated. Unknown and duplicate keys are errors.
 */
struct RunConfig
{
    struct Geometry
    {
        std::optional<double> R;
        std::optional<double> r;
        std::optional<double> L;
        Shape shape{Shape::flask};
    } geometry;

    struct Scan
    {
        std::vector<double> a_values;
        std::optional<double> a_min;
        std::optional<double> a_max;
        std::optional<std::size_t> n;
        bool log_spacing{false};
    } scan;

    struct Mc
    {
        std::size_t n_loops{20000};
        std::size_t n_points{4096};
        std::size_t n_beta{48};
        double beta_min_factor{1.0 / 16};
        double beta_max_factor{64};
        std::optional<std::uint64_t> seed;
        std::size_t x_samples_per_beta{1};
        XSampling x_sampling{XSampling::loop_adapted};
        bool doubling_study{true};
    } mc;

    struct Output
    {
        std::string csv_path{"scan.csv"};
        std::string json_path{"scan.json"};
    } output;

    struct Spectral
    {
        std::string domain;  //!< interval, disk, box, flask-D0 .. flask-D3
        std::vector<double> size;
        std::vector<double> betas;
        std::optional<double> a;
        bool mc{false};
    } spectral;

    struct Bound
    {
        std::optional<double> r;
        std::optional<double> R;
        std::optional<double> a;
    } bound;

    //! Parsed assignments in file order, with typed values.
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();

    //! Piston heights from scan.a_values or (a_min, a_max, n).
    std::vector<double> heights() const;
    //! Seed; throws ConfigError when absent.
    std::uint64_t require_seed() const;
    GridPolicy grid_policy() const;
    XSampler x_sampler() const;
};

//! Parse configuration text. Errors carry "source:line:column:" prefixes.
RunConfig parse_config(std::string_view text, std::string const& source);

//! Read and parse a file; throws IoError if it cannot be read.
RunConfig load_config(std::filesystem::path const& path);

}  // namespace casimir::cli
