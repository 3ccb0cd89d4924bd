// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/cli/checks.hpp
//! Oracle checks shared by `casimir validate` and the acceptance suite.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "casimir/interaction.hpp"

namespace casimir::cli
{
//! Estimate against an exact value.
struct Comparison
{
    std::string label;
    double estimate{0};
    double expected{0};
    double std_error{0};

    //! (estimate - expected) / std_error; zero when both differences vanish.
    double z() const;
    bool within(double n_sigma) const;
};

struct CheckResult
{
    std::string name;
    bool pass{false};
    std::string detail;
};

//! Covariances of unit-loop coordinates at tau in {1/4, 1/2, 3/4} against
//! min(s, t) - s t, per axis. n_points must be a multiple of 4.
std::vector<Comparison> bridge_moments(std::uint64_t seed, std::size_t n_loops, std::size_t n_points);
CheckResult check_bridge_law(std::uint64_t seed, std::size_t n_loops, std::size_t n_points);

//! Largest |poisson - eigsum - 1/2| over a 10 x 10 log grid of (s, beta).
double theta_relation_residual();
CheckResult check_theta_relation();

CheckResult check_disk_bound();

//! Unit cube at one beta: N-doubling study with Richardson extrapolation.
CheckResult check_box_mc(std::uint64_t seed, std::size_t n_loops, std::size_t n_points, double beta);

//! Largest relative alternating sum of a0 and a1 over random valid systems.
double weyl_residual(std::uint64_t seed, std::size_t n_sets);
CheckResult check_weyl_cancellation(std::uint64_t seed, std::size_t n_sets);

/*!
 * Cylinder of radius 1 and length 4 at beta = 1, loops based at its
 * center: joint containment against the product of disk and interval
 * containment of the split loops. The error is the delta-method error of
 * the difference.
 */
Comparison factorization(std::uint64_t seed, std::size_t n_loops, std::size_t n_points);
CheckResult check_factorization(std::uint64_t seed, std::size_t n_loops, std::size_t n_points);

//! Hemisphere-bottom flask r = R = 1, L = 2.5 scanned at a = 0.2, 0.5, 1.0.
ScanResult hemisphere_scan(std::uint64_t seed, std::size_t n_loops, std::size_t n_points, std::size_t n_beta);
CheckResult check_hemisphere_exclusion(std::uint64_t seed,
                                       std::size_t n_loops,
                                       std::size_t n_points,
                                       std::size_t n_beta);

//! Fewest loops for the statistical checks of `validate`.
inline constexpr std::size_t min_statistical_loops = 10'000;
//! Fewest classified samples for the hemisphere check.
inline constexpr std::size_t min_hemisphere_samples = 1'000'000;

}  // namespace casimir::cli
