// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/loops.hpp
//! Discretized standard Brownian bridges ("unit loops").
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "random.hpp"
#include "vec3.hpp"

namespace casimir
{
//---------------------------------------------------------------------------//
/*!
 * Standard Brownian bridge of unit proper time based at the origin.
 *
 * points[i] is the position at tau = i / N for i = 0..N-1. The closing point
 * at tau = 1 is the origin and is not stored.
 */
struct UnitLoop
{
    std::vector<Vec3> points;

    std::size_t size() const { return points.size(); }
};

/*!
 * Sample a unit loop with n_points >= 2 points.
 *
 * Powers of two use midpoint bisection, coarse levels first, so the loop
 * with N points is exactly the even-indexed subsequence of the loop with 2N
 * points drawn from the same stream. Other sizes use sequential
 * conditioning on the pinned endpoint.
 */
UnitLoop sample_unit_loop(std::size_t n_points, RandomStream& stream);
void sample_unit_loop(std::size_t n_points, RandomStream& stream, UnitLoop& out);

//! Point order that visits coarse bisection levels first. Containment scans
//! in this order reject escaping loops after few points.
std::vector<std::uint32_t> coarse_to_fine_order(std::size_t n_points);

//---------------------------------------------------------------------------//
/*!
 * Reproducible set of unit loops.
 *
 * Loop i is generated from the stream (seed, loop_shape, i), so any loop can
 * be recreated in isolation and the ensemble never needs to be stored. An
 * ensemble read from a cache file serves its stored loops instead.
 */
class LoopEnsemble
{
  public:
    LoopEnsemble(std::uint64_t seed, std::size_t n_points, std::size_t count);
    LoopEnsemble(std::uint64_t seed, std::size_t n_points, std::vector<UnitLoop> loops);

    std::uint64_t seed() const { return seed_; }
    std::size_t n_points() const { return n_points_; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    bool is_stored() const { return stored_ != nullptr; }

    UnitLoop loop(std::size_t i) const;
    //! Write loop i into `out`, reusing its storage.
    void fill(std::size_t i, UnitLoop& out) const;

  private:
    std::uint64_t seed_;
    std::size_t n_points_;
    std::size_t count_;
    std::shared_ptr<std::vector<UnitLoop> const> stored_;
};

//! Binary cache: "CASLOOPS", u32 version, u32 reserved, u64 seed,
//! u64 n_points, u64 count, then count * n_points * (x, y, z) as
//! little-endian IEEE-754 doubles.
inline constexpr std::uint32_t ensemble_cache_version = 1;
void write_ensemble(std::filesystem::path const& path, LoopEnsemble const& ensemble);
LoopEnsemble read_ensemble(std::filesystem::path const& path);

//---------------------------------------------------------------------------//
// SCALING AND SHAPE
//---------------------------------------------------------------------------//
//! Points x + sqrt(beta) * omega_i. Throws std::invalid_argument if beta <= 0.
std::vector<Vec3> realize(UnitLoop const& loop, double beta, Vec3 x);

struct Extent1D
{
    double min{0};
    double max{0};

    double range() const { return max - min; }
};

//! Extent of the points along one axis. Throws on an empty list.
Extent1D extent(std::span<Vec3 const> points, Axis axis);

//! Projections of a loop onto the transverse plane and the z axis.
struct SplitLoop
{
    std::vector<Vec2> transverse;
    std::vector<double> longitudinal;
};

SplitLoop split(UnitLoop const& loop);
UnitLoop recombine(SplitLoop const& parts);

//---------------------------------------------------------------------------//
//! Per-loop data used by the energy estimators.
struct LoopShape
{
    double z_min{0};
    double z_max{0};
    std::size_t top_index{0};  //!< index of a point attaining z_max
};

LoopShape summarize(UnitLoop const& loop);

}  // namespace casimir
