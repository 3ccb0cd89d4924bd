// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/spectral.hpp
//! Dirichlet heat-kernel traces phi(beta) = sum_n exp(-beta lambda_n / 2):
//! closed-form oracles for simple domains and a world-line estimator.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "loops.hpp"

namespace casimir
{
//! Series truncation: after the leading term, stop once the next term is
//! below cutoff * |partial sum| (or underflows to zero). Exceeding max_terms
//! throws std::runtime_error.
struct TruncationPolicy
{
    double cutoff{1e-16};
    std::size_t max_terms{1'000'000};
};

struct SpectralEstimate
{
    double value{0};
    double std_error{0};
    std::size_t n_samples{0};
};

//! Interval [0, s] from its eigenvalues pi^2 n^2 / s^2.
double phi_interval_eigsum(double s, double beta, TruncationPolicy const& policy = {});

//! Resummed form s / sqrt(2 pi beta) * (1 + 2 sum_n exp(-2 s^2 n^2 / beta)).
//! Exceeds phi_interval_eigsum by exactly 1/2 (Jacobi theta identity).
double phi_interval_poisson(double s, double beta, TruncationPolicy const& policy = {});

//! Second derivative in s of the interval trace. The additive constant
//! between the two forms drops out; the faster converging series is used.
double d2phi_interval_ds2(double s, double beta, TruncationPolicy const& policy = {});

//! k-th positive zero (k >= 1) of the Bessel function J_m. Zeros are
//! bracketed by a sign scan and refined, then cached per order.
double bessel_zero(int m, int k);

//! Disk of radius r: sum over zeros j_{m,k} with multiplicity 1 (m = 0) or
//! 2 (m > 0) of exp(-beta j^2 / (2 r^2)). Always below r^2 / (2 beta).
double phi_disk_eigsum(double r, double beta, TruncationPolicy const& policy = {});

//! Rectangular box: product of three interval traces.
double phi_box_eigsum(double lx, double ly, double lz, double beta,
                      TruncationPolicy const& policy = {});

//! Base point draws for the world-line estimator.
struct SpectralSampling
{
    std::uint64_t seed{0};
    std::size_t x_per_loop{1};
};

/*!
 * World-line estimate V_box / (2 pi beta)^{3/2} * P[loop inside domain], with
 * x uniform in the sampling box and loops from the ensemble. Binomial
 * standard error. The sampling box must contain the domain.
 *
 * All betas share the same loops and the same base points (common random
 * numbers), and x draws for loop i are a function of (seed, i) only.
 */
std::vector<SpectralEstimate> phi_mc(Region const& domain,
                                     std::span<double const> betas,
                                     LoopEnsemble const& ensemble,
                                     Box const& sampling_box,
                                     SpectralSampling const& sampling);

//! Estimates at n_points, at n_points / 2 (every other point of the same
//! loops) and their Richardson combination, assuming the containment bias
//! scales like n_points^{-1/2}.
struct SpectralRefinement
{
    SpectralEstimate coarse;
    SpectralEstimate fine;
    SpectralEstimate extrapolated;
};

/*!
 * Doubling study from one pass: the half-resolution loop is the
 * even-indexed subsequence of each loop, so both levels see identical
 * paths and base points. The extrapolated error uses the joint per-sample
 * variance. Requires a power-of-two n_points >= 4.
 */
std::vector<SpectralRefinement> phi_mc_refinement(Region const& domain,
                                                  std::span<double const> betas,
                                                  LoopEnsemble const& ensemble,
                                                  Box const& sampling_box,
                                                  SpectralSampling const& sampling);

SpectralEstimate phi_mc(Region const& domain,
                        double beta,
                        LoopEnsemble const& ensemble,
                        Box const& sampling_box,
                        SpectralSampling const& sampling);

}  // namespace casimir
