// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file geometry.cpp
#include "casimir/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace casimir
{
namespace
{
constexpr double pi = std::numbers::pi;

template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool condition, char const* what)
{
    if (!condition)
    {
        throw std::invalid_argument(what);
    }
}

Primitive validated(Primitive prim)
{
    std::visit(Overloaded{
                   [](Ball const& b) {
                       require(is_finite(b.center) && std::isfinite(b.radius),
                               "ball parameters must be finite");
                       require(b.radius > 0, "ball radius must be positive");
                   },
                   [](AxialCylinder const& c) {
                       require(std::isfinite(c.radius) && std::isfinite(c.z_min)
                                   && std::isfinite(c.z_max),
                               "cylinder parameters must be finite");
                       require(c.radius > 0, "cylinder radius must be positive");
                       require(c.z_min < c.z_max, "cylinder requires z_min < z_max");
                   },
                   [](Box const& b) {
                       require(is_finite(b.lo) && is_finite(b.hi), "box corners must be finite");
                       require(b.lo.x < b.hi.x && b.lo.y < b.hi.y && b.lo.z < b.hi.z,
                               "box requires lo < hi on every axis");
                   },
               },
               prim);
    return prim;
}

//! Boundary area of a primitive.
double surface(Primitive const& prim)
{
    return std::visit(
        Overloaded{
            [](Ball const& b) { return 4 * pi * b.radius * b.radius; },
            [](AxialCylinder const& c) {
                return 2 * pi * c.radius * (c.z_max - c.z_min) + 2 * pi * c.radius * c.radius;
            },
            [](Box const& b) {
                Vec3 const d = b.hi - b.lo;
                return 2 * (d.x * d.y + d.y * d.z + d.z * d.x);
            },
        },
        prim);
}

//! Volume and area of a ball united with a coaxial cylinder whose bottom
//! disk lies inside the ball and whose top lies above it.
struct BulbNeck
{
    double volume;
    double area;
};

std::optional<BulbNeck> bulb_neck(Region const& d)
{
    auto parts = d.parts();
    if (parts.size() != 2)
    {
        return std::nullopt;
    }
    Ball const* ball = std::get_if<Ball>(&parts[0]);
    AxialCylinder const* cyl = std::get_if<AxialCylinder>(&parts[1]);
    if (!ball || !cyl)
    {
        ball = std::get_if<Ball>(&parts[1]);
        cyl = std::get_if<AxialCylinder>(&parts[0]);
    }
    if (!ball || !cyl)
    {
        return std::nullopt;
    }
    double const big_r = ball->radius;
    double const c = ball->center.z;
    double const r = cyl->radius;
    if (ball->center.x != 0 || ball->center.y != 0 || r > big_r)
    {
        return std::nullopt;
    }
    double const h = std::sqrt(big_r * big_r - r * r);
    if (std::abs(cyl->z_min - c) > h || cyl->z_max < c + big_r)
    {
        return std::nullopt;
    }

    double const cyl_len = cyl->z_max - cyl->z_min;
    // Cylinder part inside the ball: slab from z_min to the center plus the
    // upper spherical segment over the disk of radius r.
    double const overlap = pi * r * r * (c - cyl->z_min)
                           + (2 * pi / 3) * (big_r * big_r * big_r - h * h * h);
    double const vol = (4 * pi / 3) * big_r * big_r * big_r + pi * r * r * cyl_len - overlap;

    double const sphere_outside = 4 * pi * big_r * big_r - 2 * pi * big_r * (big_r - h);
    double const wall_outside = 2 * pi * r * (cyl->z_max - (c + h));
    double const top_disk = pi * r * r;
    return BulbNeck{vol, sphere_outside + wall_outside + top_disk};
}

template<class F>
double weyl_data(Region const& d, F&& single, double BulbNeck::*member)
{
    auto parts = d.parts();
    if (parts.size() == 1)
    {
        return single(parts.front());
    }
    if (auto bn = bulb_neck(d))
    {
        return (*bn).*member;
    }
    throw std::domain_error("Weyl coefficients are only available for single "
                            "primitives and a ball joined to a coaxial neck");
}

}  // namespace

//---------------------------------------------------------------------------//
Region::Region(Ball b) : parts_{validated(b)} {}
Region::Region(AxialCylinder c) : parts_{validated(c)} {}
Region::Region(Box b) : parts_{validated(b)} {}

Region unite(Region lhs, Region const& rhs)
{
    lhs.parts_.insert(lhs.parts_.end(), rhs.parts_.begin(), rhs.parts_.end());
    return lhs;
}

bool Region::contains(Vec3 p) const
{
    return std::any_of(parts_.begin(), parts_.end(),
                       [p](Primitive const& prim) { return casimir::contains(prim, p); });
}

bool contains(Primitive const& prim, Vec3 p)
{
    return std::visit(
        Overloaded{
            [p](Ball const& b) {
                Vec3 const d = p - b.center;
                return dot(d, d) <= b.radius * b.radius;
            },
            [p](AxialCylinder const& c) {
                return p.z >= c.z_min && p.z <= c.z_max && radial_sq(p) <= c.radius * c.radius;
            },
            [p](Box const& b) {
                return p.x >= b.lo.x && p.x <= b.hi.x && p.y >= b.lo.y && p.y <= b.hi.y
                       && p.z >= b.lo.z && p.z <= b.hi.z;
            },
        },
        prim);
}

double volume(Primitive const& prim)
{
    return std::visit(Overloaded{
                          [](Ball const& b) { return (4 * pi / 3) * b.radius * b.radius * b.radius; },
                          [](AxialCylinder const& c) {
                              return pi * c.radius * c.radius * (c.z_max - c.z_min);
                          },
                          [](Box const& b) {
                              Vec3 const d = b.hi - b.lo;
                              return d.x * d.y * d.z;
                          },
                      },
                      prim);
}

//---------------------------------------------------------------------------//
void FlaskSystem::validate() const
{
    require(std::isfinite(bulb_radius) && std::isfinite(neck_radius)
                && std::isfinite(neck_length) && std::isfinite(piston_height),
            "flask parameters must be finite");
    require(neck_radius > 0, "neck radius r must be positive");
    require(neck_radius <= bulb_radius, "neck radius r must not exceed bulb radius R");
    require(bulb_radius < neck_length, "neck length L must exceed bulb radius R");
    require(piston_height > 0, "piston height a must be positive");
    require(piston_height < neck_length, "piston height a must be below the neck top L");
}

double FlaskSystem::junction_height() const
{
    return -bulb_radius + std::sqrt(bulb_radius * bulb_radius - neck_radius * neck_radius);
}

Region const& DomainSet::domain(int k) const
{
    switch (k)
    {
        case 0: return flask_below_piston;
        case 1: return cylinder_below_piston;
        case 2: return cylinder;
        case 3: return flask;
    }
    throw std::out_of_range("domain index must be in 0..3");
}

DomainSet build_domains(FlaskSystem const& sys)
{
    sys.validate();
    double const big_r = sys.bulb_radius;
    double const r = sys.neck_radius;
    double const len = sys.neck_length;
    double const a = sys.piston_height;

    Ball const bulb{{0, 0, -big_r}, big_r};
    double const floor = -std::max(len, 2 * big_r);
    AxialCylinder const bounds{std::max(r, big_r), floor, len};

    DomainSet ds{
        .flask_below_piston = unite(Region{bulb}, Region{AxialCylinder{r, -big_r, a}}),
        .cylinder_below_piston = Region{AxialCylinder{r, -len, a}},
        .cylinder = Region{AxialCylinder{r, -len, len}},
        .flask = unite(Region{bulb}, Region{AxialCylinder{r, -big_r, len}}),
        .sampling_region = bounds,
        .sampling_volume = volume(bounds),
        .piston_z = a,
        .neck_radius = r,
        .ceiling_z = len,
        .floor_z = floor,
        .junction_z = sys.junction_height(),
        .warnings = {},
    };

    double const flask_bottom_at_wall = -big_r - std::sqrt(big_r * big_r - r * r);
    if (!(len > -flask_bottom_at_wall))
    {
        std::ostringstream msg;
        msg << "reference cylinder (L=" << len << ") does not extend below the flask (needs L > "
            << -flask_bottom_at_wall << "); no (-) loops can occur";
        ds.warnings.push_back(msg.str());
    }
    return ds;
}

DomainSet build_reference_domains(double neck_radius, double neck_length, double piston_height)
{
    require(neck_radius > 0 && neck_length > 0, "cylinder dimensions must be positive");
    require(piston_height > 0 && piston_height < neck_length,
            "piston height a must lie in (0, L)");
    AxialCylinder const whole{neck_radius, -neck_length, neck_length};
    AxialCylinder const below{neck_radius, -neck_length, piston_height};
    return DomainSet{
        .flask_below_piston = Region{below},
        .cylinder_below_piston = Region{below},
        .cylinder = Region{whole},
        .flask = Region{whole},
        .sampling_region = whole,
        .sampling_volume = volume(whole),
        .piston_z = piston_height,
        .neck_radius = neck_radius,
        .ceiling_z = neck_length,
        .floor_z = -neck_length,
        .junction_z = std::nullopt,
        .warnings = {},
    };
}

//---------------------------------------------------------------------------//
double weyl_a0(Region const& d)
{
    return weyl_data(d, [](Primitive const& p) { return volume(p); }, &BulbNeck::volume);
}

double weyl_a1(Region const& d)
{
    return -0.25 * weyl_data(d, [](Primitive const& p) { return surface(p); }, &BulbNeck::area);
}

std::pair<double, double> subtraction_check(DomainSet const& ds)
{
    double a0 = 0;
    double a1 = 0;
    for (int k = 0; k < 4; ++k)
    {
        double const sign = (k % 2 == 0) ? 1 : -1;
        a0 += sign * weyl_a0(ds.domain(k));
        a1 += sign * weyl_a1(ds.domain(k));
    }
    return {a0, a1};
}

//---------------------------------------------------------------------------//
char const* to_string(LoopClass c)
{
    switch (c)
    {
        case LoopClass::plus: return "plus";
        case LoopClass::minus: return "minus";
        case LoopClass::null: return "null";
    }
    return "?";
}

bool loop_in_domain(std::span<Vec3 const> points, Region const& d)
{
    if (points.empty())
    {
        throw std::invalid_argument("loop_in_domain requires at least one point");
    }
    return std::all_of(points.begin(), points.end(), [&d](Vec3 p) { return d.contains(p); });
}

ContainmentBits containment_bits(std::span<Vec3 const> points, DomainSet const& ds)
{
    ContainmentBits bits{};
    for (int k = 0; k < 4; ++k)
    {
        bits[k] = loop_in_domain(points, ds.domain(k));
    }
    return bits;
}

int alternating_weight(ContainmentBits const& bits)
{
    return -int{bits[0]} + int{bits[1]} - int{bits[2]} + int{bits[3]};
}

LoopClass classify_loop(std::span<Vec3 const> points, DomainSet const& ds)
{
    ContainmentBits const bits = containment_bits(points, ds);
    if ((bits[0] && !bits[3]) || (bits[1] && !bits[2]))
    {
        throw std::logic_error("containment bits violate D0 in D3 or D1 in D2");
    }
    constexpr ContainmentBits flask_only{false, false, false, true};
    constexpr ContainmentBits cylinder_only{false, false, true, false};
    int const w = alternating_weight(bits);
    if (w == 1 && bits == flask_only)
    {
        return LoopClass::plus;
    }
    if (w == -1 && bits == cylinder_only)
    {
        return LoopClass::minus;
    }
    if (w == 0)
    {
        return LoopClass::null;
    }
    throw std::logic_error("nonzero loop weight from an unexpected containment pattern");
}

}  // namespace casimir
