// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/vec3.hpp
#pragma once

#include <cmath>

namespace casimir
{
//! Point or displacement in 3-space (natural units, lengths).
struct Vec3
{
    double x{0};
    double y{0};
    double z{0};

    friend constexpr bool operator==(Vec3 const&, Vec3 const&) = default;
};

//! Point in the transverse (x, y) plane.
struct Vec2
{
    double x{0};
    double y{0};

    friend constexpr bool operator==(Vec2 const&, Vec2 const&) = default;
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

//! Squared distance from the z axis.
constexpr double radial_sq(Vec3 p) { return p.x * p.x + p.y * p.y; }
constexpr double radial_sq(Vec2 p) { return p.x * p.x + p.y * p.y; }

inline bool is_finite(Vec3 p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

enum class Axis
{
    x,
    y,
    z
};

constexpr double component(Vec3 p, Axis axis)
{
    switch (axis)
    {
        case Axis::x: return p.x;
        case Axis::y: return p.y;
        case Axis::z: return p.z;
    }
    return p.z;
}

}  // namespace casimir
