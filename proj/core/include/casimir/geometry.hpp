// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file casimir/geometry.hpp
//! Closed regions, the flask/cylinder domain set and loop classification.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vec3.hpp"

namespace casimir
{
//---------------------------------------------------------------------------//
// PRIMITIVES
//---------------------------------------------------------------------------//
struct Ball
{
    Vec3 center;
    double radius{1};
};

//! Solid cylinder whose axis is the z axis.
struct AxialCylinder
{
    double radius{1};
    double z_min{0};
    double z_max{1};
};

//! Axis-aligned box [lo, hi].
struct Box
{
    Vec3 lo;
    Vec3 hi;
};

using Primitive = std::variant<Ball, AxialCylinder, Box>;

//---------------------------------------------------------------------------//
/*!
 * Closed subset of 3-space: a finite union of primitives.
 *
 * Boundary points are contained. Primitives are validated on construction
 * (positive radii, non-empty extents, finite coordinates).
 */
class Region
{
  public:
    Region(Ball b);
    Region(AxialCylinder c);
    Region(Box b);

    //! Union of two regions.
    friend Region unite(Region lhs, Region const& rhs);

    bool contains(Vec3 p) const;

    std::span<Primitive const> parts() const { return parts_; }

  private:
    std::vector<Primitive> parts_;
};

Region unite(Region lhs, Region const& rhs);

bool contains(Primitive const& prim, Vec3 p);
inline bool contains(Region const& region, Vec3 p) { return region.contains(p); }

//! Analytic volume of a primitive.
double volume(Primitive const& prim);

//---------------------------------------------------------------------------//
// FLASK SYSTEM
//---------------------------------------------------------------------------//
/*!
 * Piston in the neck of a flask with a spherical bulb.
 *
 * Requires 0 < neck_radius <= bulb_radius < neck_length and
 * 0 < piston_height < neck_length.
 */
struct FlaskSystem
{
    double bulb_radius{1};    //!< R
    double neck_radius{0.5};  //!< r
    double neck_length{3};    //!< L, also the half-length of the reference cylinder
    double piston_height{1};  //!< a, measured from the top of the bulb sphere

    //! Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    //! Height where the neck wall meets the bulb sphere: -R + sqrt(R^2 - r^2).
    double junction_height() const;
};

/*!
 * Domains of the alternating sum, in a frame with z along the neck and
 * z = 0 at the top of the bulb sphere.
 *
 * Index k of domain(k) is the sign index: the alternating sum is
 * sum_k (-1)^k phi(D_k).
 */
struct DomainSet
{
    Region flask_below_piston;     //!< D0
    Region cylinder_below_piston;  //!< D1
    Region cylinder;               //!< D2, whole reference cylinder
    Region flask;                  //!< D3, whole flask

    //! Bounding cylinder covering D2 and D3.
    AxialCylinder sampling_region;
    double sampling_volume{0};

    double piston_z{0};
    double neck_radius{0};
    double ceiling_z{0};  //!< highest z of D2 and D3
    double floor_z{0};    //!< lowest z of D2 and D3
    //! Upper bound on z over the symmetric difference of D2 and D3; empty
    //! when the two coincide.
    std::optional<double> junction_z;

    std::vector<std::string> warnings;

    Region const& domain(int k) const;
};

//! Flask domain set. Throws std::invalid_argument on invalid parameters;
//! records a warning when the cylinder does not reach below the flask.
DomainSet build_domains(FlaskSystem const& sys);

//! Degenerate set where the flask is replaced by the reference cylinder
//! itself (D3 = D2, D0 = D1).
DomainSet build_reference_domains(double neck_radius, double neck_length, double piston_height);

//---------------------------------------------------------------------------//
// WEYL DATA
//---------------------------------------------------------------------------//
//! Volume. Supports single primitives and a ball united with a coaxial
//! cylinder that starts inside the ball and ends above it.
double weyl_a0(Region const& d);
//! Minus a quarter of the boundary area, for the same shapes as weyl_a0.
double weyl_a1(Region const& d);

//! Alternating sums (sum_k (-1)^k a0(D_k), sum_k (-1)^k a1(D_k)).
std::pair<double, double> subtraction_check(DomainSet const& ds);

//---------------------------------------------------------------------------//
// LOOP CLASSIFICATION
//---------------------------------------------------------------------------//
enum class LoopClass
{
    null,
    plus,   //!< inside the whole flask only
    minus,  //!< inside the whole cylinder only
};

constexpr int weight(LoopClass c)
{
    switch (c)
    {
        case LoopClass::plus: return 1;
        case LoopClass::minus: return -1;
        case LoopClass::null: return 0;
    }
    return 0;
}

char const* to_string(LoopClass c);

//! True iff every sample point lies in the region. Throws on an empty list.
bool loop_in_domain(std::span<Vec3 const> points, Region const& d);

using ContainmentBits = std::array<bool, 4>;

//! Containment of the discretized loop in D0..D3.
ContainmentBits containment_bits(std::span<Vec3 const> points, DomainSet const& ds);

//! Weight -b0 + b1 - b2 + b3 of a bit pattern.
int alternating_weight(ContainmentBits const& bits);

/*!
 * Classify a discretized loop.
 *
 * Throws std::logic_error if the bits violate D0 in D3 or D1 in D2, or if
 * the weight falls outside {-1, 0, 1}.
 */
LoopClass classify_loop(std::span<Vec3 const> points, DomainSet const& ds);

}  // namespace casimir
