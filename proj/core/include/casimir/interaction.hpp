// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/interaction.hpp
//! Interaction Casimir energy of the flask piston and the force on it.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "loops.hpp"

namespace casimir
{
//---------------------------------------------------------------------------//
// PROPER-TIME GRID
//---------------------------------------------------------------------------//
/*!
 * Log-spaced proper-time nodes with trapezoid weights in log(beta).
 *
 * The weights already include the Jacobian, so
 * integral f(beta) dbeta ~= sum_j weights[j] * f(nodes[j]).
 */
struct BetaGrid
{
    std::vector<double> nodes;
    std::vector<double> weights;

    //! Throws std::invalid_argument unless 0 < beta_min < beta_max and
    //! count >= 3.
    static BetaGrid log_spaced(double beta_min, double beta_max, std::size_t count);

    std::size_t size() const { return nodes.size(); }
    double log_step() const;
};

//! beta_min = min_factor * a_min^2, beta_max = max_factor * (2R + a_max)^2.
struct GridPolicy
{
    std::size_t n_beta{48};
    double min_factor{1.0 / 16};
    double max_factor{64};
};

BetaGrid make_grid(double bulb_radius, double a_min, double a_max, GridPolicy const& policy = {});
BetaGrid make_grid(FlaskSystem const& sys, GridPolicy const& policy = {});

//---------------------------------------------------------------------------//
// SAMPLING
//---------------------------------------------------------------------------//
enum class XSampling
{
    //! x uniform over the bounding cylinder of D2 and D3.
    uniform,
    /*!
     * x uniform over the per-loop translation volume that can give a
     * nonzero weight: the loop top inside the neck disk above the piston,
     * its bottom below the neck junction and inside the floor/ceiling.
     * Unbiased because the weight vanishes outside that volume.
     */
    loop_adapted,
};

struct XSampler
{
    XSampling mode{XSampling::loop_adapted};
    std::uint64_t seed{0};
    std::size_t per_loop{1};  //!< base points per (loop, beta node)
};

char const* to_string(XSampling mode);

//---------------------------------------------------------------------------//
// RESULTS
//---------------------------------------------------------------------------//
//! Integrand I(beta) with E_int = integral I(beta) dbeta.
struct IntegrandValue
{
    double beta{0};
    double value{0};
    double std_error{0};
    double plus{0};
    double minus{0};
    std::size_t n_plus{0};
    std::size_t n_minus{0};
    std::size_t n_null{0};
};

struct EnergyEstimate
{
    double value{0};  //!< plus_component + minus_component
    double std_error{0};
    double plus_component{0};
    double minus_component{0};
    double plus_std_error{0};
    double minus_std_error{0};
    std::size_t n_plus{0};
    std::size_t n_minus{0};
    std::size_t n_null{0};
    //! First or last grid cell is not negligible against the result.
    bool tail_warning{false};
    std::vector<IntegrandValue> integrand;
};

//! Force -dE/da between two neighboring scan heights, at their midpoint.
struct ForcePoint
{
    double a{0};
    double value{0};
    double std_error{0};
};

struct Bracket
{
    double a_lo{0};
    double a_hi{0};
    double a_star{0};  //!< bisection point of the bracket
};

struct ScanResult
{
    std::vector<double> heights;
    std::vector<EnergyEstimate> energies;
    std::vector<ForcePoint> forces;
    std::optional<Bracket> equilibrium;
    BetaGrid grid;
};

//---------------------------------------------------------------------------//
// OPERATIONS
//---------------------------------------------------------------------------//
//! Weight of one realized loop: classify_loop(realize(loop, beta, x), ds).
int sample_weight(Vec3 x, double beta, UnitLoop const& loop, DomainSet const& ds);

//! I(beta) = V / (8 pi^2 beta^3) * mean(w) for a single proper time.
IntegrandValue integrand(double beta,
                         DomainSet const& ds,
                         LoopEnsemble const& ensemble,
                         XSampler const& sampler);

EnergyEstimate estimate_energy(DomainSet const& ds,
                               BetaGrid const& grid,
                               LoopEnsemble const& ensemble,
                               XSampler const& sampler);

EnergyEstimate estimate_energy(FlaskSystem const& sys,
                               BetaGrid const& grid,
                               LoopEnsemble const& ensemble,
                               XSampler const& sampler);

enum class Shape
{
    flask,     //!< spherical bulb with a cylindrical neck
    cylinder,  //!< degenerate check: the flask is the reference cylinder
};

/*!
 * Energies at increasing piston heights from one set of draws.
 *
 * The piston height of `sys` is ignored. Every height sees the same loops,
 * base points and proper times, so forces between neighbors carry the
 * correlated (small) error of the per-sample differences.
 */
ScanResult force_scan(FlaskSystem const& sys,
                      std::span<double const> heights,
                      GridPolicy const& grid_policy,
                      LoopEnsemble const& ensemble,
                      XSampler const& sampler,
                      Shape shape = Shape::flask);

//! Casimir energy of two Dirichlet plates of area pi r^2 at distance d:
//! -pi^3 r^2 / (1440 d^3).
double plate_bound(double r, double d);

struct AsymptoticEstimate
{
    double value{0};
    double error{0};  //!< quadrature error estimate
    bool regime_ok{false};  //!< L >= 4R and R >= 4r
};

/*!
 * Long-thin-neck estimate of the (-) channel:
 * -int dbeta phi_disk(r, beta) int_{2R+a}^inf ds (s - 2R - a)
 *   / (2 sqrt(2 pi) beta^{3/2}) d^2 phi_interval(s, beta) / ds^2.
 *
 * Throws std::runtime_error if the nested quadrature misses its tolerance.
 */
AsymptoticEstimate asymptotic_minus(FlaskSystem const& sys);

//! Same estimate from (r, R, a) alone; the flask invariants are not
//! required and regime_ok only checks R >= 4r.
AsymptoticEstimate asymptotic_minus(double neck_radius, double bulb_radius, double piston_height);

//! Inner s-integral of asymptotic_minus at plate separation d.
double asymptotic_minus_inner(double d, double beta);

}  // namespace casimir
