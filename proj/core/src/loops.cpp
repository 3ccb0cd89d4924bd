// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file loops.cpp
#include "casimir/loops.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace casimir
{
namespace
{
Vec3 gaussian_step(RandomStream& stream, double sd)
{
    double const x = stream.normal();
    double const y = stream.normal();
    double const z = stream.normal();
    return {sd * x, sd * y, sd * z};
}

void bisect(std::size_t n, RandomStream& stream, std::vector<Vec3>& pts)
{
    double const inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t step = n; step > 1; step /= 2)
    {
        std::size_t const half = step / 2;
        // Midpoint of an interval of length 2*half/N has conditional
        // variance (2*half/N)/4.
        double const sd = std::sqrt(0.5 * static_cast<double>(half) * inv_n);
        for (std::size_t i = half; i < n; i += step)
        {
            Vec3 const left = pts[i - half];
            Vec3 const right = (i + half == n) ? Vec3{} : pts[i + half];
            pts[i] = 0.5 * (left + right) + gaussian_step(stream, sd);
        }
    }
}

void sequential(std::size_t n, RandomStream& stream, std::vector<Vec3>& pts)
{
    double const dt = 1.0 / static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i)
    {
        double const remaining_prev = 1.0 - static_cast<double>(i - 1) * dt;
        double const remaining = 1.0 - static_cast<double>(i) * dt;
        double const shrink = remaining / remaining_prev;
        double const sd = std::sqrt(dt * shrink);
        pts[i] = shrink * pts[i - 1] + gaussian_step(stream, sd);
    }
}

template<class T>
void put(std::ostream& os, T value)
{
    static_assert(std::endian::native == std::endian::little,
                  "ensemble cache I/O assumes a little-endian host");
    os.write(reinterpret_cast<char const*>(&value), sizeof(T));
}

template<class T>
T get(std::istream& is)
{
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is)
    {
        throw std::runtime_error("truncated loop ensemble cache");
    }
    return value;
}

constexpr std::array<char, 8> cache_magic{'C', 'A', 'S', 'L', 'O', 'O', 'P', 'S'};

}  // namespace

//---------------------------------------------------------------------------//
void sample_unit_loop(std::size_t n_points, RandomStream& stream, UnitLoop& out)
{
    if (n_points < 2)
    {
        throw std::invalid_argument("a unit loop needs at least 2 points");
    }
    out.points.assign(n_points, Vec3{});
    if (std::has_single_bit(n_points))
    {
        bisect(n_points, stream, out.points);
    }
    else
    {
        sequential(n_points, stream, out.points);
    }
}

UnitLoop sample_unit_loop(std::size_t n_points, RandomStream& stream)
{
    UnitLoop result;
    sample_unit_loop(n_points, stream, result);
    return result;
}

std::vector<std::uint32_t> coarse_to_fine_order(std::size_t n_points)
{
    std::vector<std::uint32_t> order;
    order.reserve(n_points);
    if (!std::has_single_bit(n_points))
    {
        for (std::size_t i = 0; i < n_points; ++i)
        {
            order.push_back(static_cast<std::uint32_t>(i));
        }
        return order;
    }
    order.push_back(0);
    for (std::size_t step = n_points; step > 1; step /= 2)
    {
        for (std::size_t i = step / 2; i < n_points; i += step)
        {
            order.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return order;
}

//---------------------------------------------------------------------------//
LoopEnsemble::LoopEnsemble(std::uint64_t seed, std::size_t n_points, std::size_t count)
    : seed_{seed}, n_points_{n_points}, count_{count}
{
    if (n_points < 2)
    {
        throw std::invalid_argument("a unit loop needs at least 2 points");
    }
}

LoopEnsemble::LoopEnsemble(std::uint64_t seed, std::size_t n_points, std::vector<UnitLoop> loops)
    : LoopEnsemble(seed, n_points, loops.size())
{
    for (auto const& l : loops)
    {
        if (l.size() != n_points)
        {
            throw std::invalid_argument("stored loop has the wrong number of points");
        }
    }
    stored_ = std::make_shared<std::vector<UnitLoop> const>(std::move(loops));
}

void LoopEnsemble::fill(std::size_t i, UnitLoop& out) const
{
    if (i >= count_)
    {
        throw std::out_of_range("loop index outside the ensemble");
    }
    if (stored_)
    {
        out = (*stored_)[i];
        return;
    }
    RandomStream stream{seed_, StreamTag::loop_shape, i};
    sample_unit_loop(n_points_, stream, out);
}

UnitLoop LoopEnsemble::loop(std::size_t i) const
{
    UnitLoop result;
    fill(i, result);
    return result;
}

void write_ensemble(std::filesystem::path const& path, LoopEnsemble const& ensemble)
{
    std::ofstream os{path, std::ios::binary};
    if (!os)
    {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    os.write(cache_magic.data(), cache_magic.size());
    put<std::uint32_t>(os, ensemble_cache_version);
    put<std::uint32_t>(os, 0);
    put<std::uint64_t>(os, ensemble.seed());
    put<std::uint64_t>(os, ensemble.n_points());
    put<std::uint64_t>(os, ensemble.size());
    UnitLoop buffer;
    for (std::size_t i = 0; i < ensemble.size(); ++i)
    {
        ensemble.fill(i, buffer);
        for (Vec3 const& p : buffer.points)
        {
            put(os, p.x);
            put(os, p.y);
            put(os, p.z);
        }
    }
    if (!os)
    {
        throw std::runtime_error("failed writing '" + path.string() + "'");
    }
}

LoopEnsemble read_ensemble(std::filesystem::path const& path)
{
    std::ifstream is{path, std::ios::binary};
    if (!is)
    {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != cache_magic)
    {
        throw std::runtime_error("'" + path.string() + "' is not a loop ensemble cache");
    }
    auto const version = get<std::uint32_t>(is);
    if (version != ensemble_cache_version)
    {
        throw std::runtime_error("unsupported loop cache version " + std::to_string(version));
    }
    get<std::uint32_t>(is);
    auto const seed = get<std::uint64_t>(is);
    auto const n_points = get<std::uint64_t>(is);
    auto const count = get<std::uint64_t>(is);
    std::vector<UnitLoop> loops(count);
    for (auto& l : loops)
    {
        l.points.resize(n_points);
        for (Vec3& p : l.points)
        {
            p.x = get<double>(is);
            p.y = get<double>(is);
            p.z = get<double>(is);
        }
    }
    return LoopEnsemble{seed, n_points, std::move(loops)};
}

//---------------------------------------------------------------------------//
std::vector<Vec3> realize(UnitLoop const& loop, double beta, Vec3 x)
{
    if (!(beta > 0))
    {
        throw std::invalid_argument("proper time beta must be positive");
    }
    double const scale = std::sqrt(beta);
    std::vector<Vec3> out;
    out.reserve(loop.size());
    for (Vec3 const& w : loop.points)
    {
        out.push_back(x + scale * w);
    }
    return out;
}

Extent1D extent(std::span<Vec3 const> points, Axis axis)
{
    if (points.empty())
    {
        throw std::invalid_argument("extent of an empty point list");
    }
    auto const [lo, hi] = std::minmax_element(
        points.begin(), points.end(),
        [axis](Vec3 a, Vec3 b) { return component(a, axis) < component(b, axis); });
    return {component(*lo, axis), component(*hi, axis)};
}

SplitLoop split(UnitLoop const& loop)
{
    SplitLoop out;
    out.transverse.reserve(loop.size());
    out.longitudinal.reserve(loop.size());
    for (Vec3 const& p : loop.points)
    {
        out.transverse.push_back({p.x, p.y});
        out.longitudinal.push_back(p.z);
    }
    return out;
}

UnitLoop recombine(SplitLoop const& parts)
{
    if (parts.transverse.size() != parts.longitudinal.size())
    {
        throw std::invalid_argument("transverse and longitudinal parts differ in length");
    }
    UnitLoop loop;
    loop.points.reserve(parts.transverse.size());
    for (std::size_t i = 0; i < parts.transverse.size(); ++i)
    {
        loop.points.push_back({parts.transverse[i].x, parts.transverse[i].y, parts.longitudinal[i]});
    }
    return loop;
}

LoopShape summarize(UnitLoop const& loop)
{
    LoopShape shape;
    for (std::size_t i = 0; i < loop.size(); ++i)
    {
        double const z = loop.points[i].z;
        shape.z_min = std::min(shape.z_min, z);
        if (z > shape.z_max)
        {
            shape.z_max = z;
            shape.top_index = i;
        }
    }
    return shape;
}

}  // namespace casimir
