// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file checks.cpp
#include "casimir/cli/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "casimir/geometry.hpp"
#include "casimir/loops.hpp"
#include "casimir/parallel.hpp"
#include "casimir/random.hpp"
#include "casimir/spectral.hpp"

namespace casimir::cli
{
namespace
{
constexpr std::size_t loops_per_stratum = 256;

template<class... Args>
std::string format(char const* fmt, Args... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

std::size_t n_strata(std::size_t n_loops)
{
    return (n_loops + loops_per_stratum - 1) / loops_per_stratum;
}

std::string under_powered(char const* what, std::size_t have, std::size_t need)
{
    return format("under-powered: %zu %s, need at least %zu (raise mc.n_loops)", have, what, need);
}

}  // namespace

//---------------------------------------------------------------------------//
double Comparison::z() const
{
    double const diff = estimate - expected;
    if (std_error > 0)
    {
        return diff / std_error;
    }
    return diff == 0 ? 0 : std::copysign(INFINITY, diff);
}

bool Comparison::within(double n_sigma) const
{
    return std::abs(z()) <= n_sigma;
}

//---------------------------------------------------------------------------//
std::vector<Comparison> bridge_moments(std::uint64_t seed, std::size_t n_loops, std::size_t n_points)
{
    if (n_points < 4 || n_points % 4 != 0)
    {
        throw std::invalid_argument("bridge moments need n_points divisible by 4");
    }
    if (n_loops < 2)
    {
        throw std::invalid_argument("bridge moments need at least 2 loops");
    }
    std::size_t const q = n_points / 4;
    // (time index s, time index t, exact covariance) for the three pairs.
    struct Pair
    {
        std::size_t s;
        std::size_t t;
        double exact;
        char const* label;
    };
    std::array<Pair, 3> const pairs{{{2 * q, 2 * q, 0.25, "Var(B_1/2)"},
                                     {q, 3 * q, 0.0625, "Cov(B_1/4,B_3/4)"},
                                     {q, 2 * q, 0.125, "Cov(B_1/4,B_1/2)"}}};

    // Sums of x_s x_t and its square per (pair, axis); the mean is known
    // to be zero, so E[x_s x_t] is the covariance.
    using Sums = std::array<std::array<double, 2>, 9>;
    std::vector<Sums> partial(n_strata(n_loops), Sums{});
    LoopEnsemble const ensemble{seed, n_points, n_loops};
    for_each_stratum(partial.size(), [&](std::size_t stratum) {
        UnitLoop loop;
        std::size_t const end = std::min(n_loops, (stratum + 1) * loops_per_stratum);
        for (std::size_t i = stratum * loops_per_stratum; i < end; ++i)
        {
            ensemble.fill(i, loop);
            for (std::size_t p = 0; p < pairs.size(); ++p)
            {
                for (int axis = 0; axis < 3; ++axis)
                {
                    double const v = component(loop.points[pairs[p].s], static_cast<Axis>(axis))
                                     * component(loop.points[pairs[p].t], static_cast<Axis>(axis));
                    auto& s = partial[stratum][3 * p + static_cast<std::size_t>(axis)];
                    s[0] += v;
                    s[1] += v * v;
                }
            }
        }
    });

    Sums total{};
    for (auto const& s : partial)
    {
        for (std::size_t k = 0; k < total.size(); ++k)
        {
            total[k][0] += s[k][0];
            total[k][1] += s[k][1];
        }
    }
    double const n = static_cast<double>(n_loops);
    std::vector<Comparison> out;
    char const* const axes = "xyz";
    for (std::size_t p = 0; p < pairs.size(); ++p)
    {
        for (std::size_t axis = 0; axis < 3; ++axis)
        {
            auto const& s = total[3 * p + axis];
            double const mean = s[0] / n;
            double const var = std::max(0.0, (s[1] - n * mean * mean) / (n - 1));
            out.push_back({format("%s %c", pairs[p].label, axes[axis]), mean, pairs[p].exact,
                           std::sqrt(var / n)});
        }
    }
    return out;
}

CheckResult check_bridge_law(std::uint64_t seed, std::size_t n_loops, std::size_t n_points)
{
    CheckResult r{"bridge covariance", false, {}};
    if (n_loops < min_statistical_loops)
    {
        r.detail = under_powered("loops", n_loops, min_statistical_loops);
        return r;
    }
    auto const moments = bridge_moments(seed, n_loops, n_points);
    double worst = 0;
    for (auto const& m : moments)
    {
        worst = std::max(worst, std::abs(m.z()));
    }
    r.pass = worst <= 3;
    r.detail = format("%zu covariances over %zu loops, max |z| = %.2f", moments.size(), n_loops, worst);
    return r;
}

//---------------------------------------------------------------------------//
double theta_relation_residual()
{
    double worst = 0;
    for (int i = 0; i < 10; ++i)
    {
        double const s = std::pow(10.0, -1 + 2.0 * i / 9);  // 0.1 .. 10
        for (int j = 0; j < 10; ++j)
        {
            double const beta = std::pow(10.0, -2 + 4.0 * j / 9);  // 0.01 .. 100
            double const diff = phi_interval_poisson(s, beta) - phi_interval_eigsum(s, beta);
            worst = std::max(worst, std::abs(diff - 0.5));
        }
    }
    return worst;
}

CheckResult check_theta_relation()
{
    double const worst = theta_relation_residual();
    return {"theta relation", worst <= 1e-10,
            format("max |poisson - eigsum - 1/2| = %.2e on 10x10 grid", worst)};
}

CheckResult check_disk_bound()
{
    int violations = 0;
    int cases = 0;
    double closest = 0;
    for (double r : {0.1, 0.5, 1.0, 3.0})
    {
        for (int j = 0; j < 12; ++j)
        {
            double const beta = r * r * std::pow(10.0, -2 + 4.0 * j / 11);
            double const ratio = phi_disk_eigsum(r, beta) / (r * r / (2 * beta));
            closest = std::max(closest, ratio);
            violations += (ratio < 1) ? 0 : 1;
            ++cases;
        }
    }
    return {"disk bound", violations == 0,
            format("%d cases, max phi_disk / (r^2 / 2 beta) = %.6f", cases, closest)};
}

//---------------------------------------------------------------------------//
CheckResult check_box_mc(std::uint64_t seed, std::size_t n_loops, std::size_t n_points, double beta)
{
    CheckResult r{"box MC (N-doubling)", false, {}};
    if (n_loops < min_statistical_loops)
    {
        r.detail = under_powered("loops", n_loops, min_statistical_loops);
        return r;
    }
    Box const cube{{0, 0, 0}, {1, 1, 1}};
    LoopEnsemble const ensemble{seed, n_points, n_loops};
    auto const study = phi_mc_refinement(Region{cube}, std::span<double const>{&beta, 1}, ensemble,
                                         cube, SpectralSampling{seed, 1})
                           .front();
    double const exact = phi_box_eigsum(1, 1, 1, beta);
    Comparison const coarse{"coarse", study.coarse.value, exact, study.coarse.std_error};
    Comparison const fine{"fine", study.fine.value, exact, study.fine.std_error};
    Comparison const extrap{"extrapolated", study.extrapolated.value, exact, study.extrapolated.std_error};
    bool const shrinking = std::abs(fine.estimate - exact) <= std::abs(coarse.estimate - exact);
    r.pass = shrinking && extrap.within(3);
    r.detail = format("beta=%g: z(N=%zu)=%.2f z(N=%zu)=%.2f z(extrapolated)=%.2f", beta, n_points / 2,
                      coarse.z(), n_points, fine.z(), extrap.z());
    return r;
}

//---------------------------------------------------------------------------//
double weyl_residual(std::uint64_t seed, std::size_t n_sets)
{
    double worst = 0;
    for (std::size_t i = 0; i < n_sets; ++i)
    {
        RandomStream rng{seed, StreamTag::test, i};
        FlaskSystem sys;
        sys.bulb_radius = 0.2 + 2.8 * rng.uniform();
        sys.neck_radius = (i % 10 == 0) ? sys.bulb_radius : sys.bulb_radius * (0.02 + 0.98 * rng.uniform());
        sys.neck_length = sys.bulb_radius * (1.01 + 5 * rng.uniform());
        sys.piston_height = sys.neck_length * (0.01 + 0.98 * rng.uniform());
        DomainSet const ds = build_domains(sys);
        auto const [s0, s1] = subtraction_check(ds);
        double scale0 = 0;
        double scale1 = 0;
        for (int k = 0; k < 4; ++k)
        {
            scale0 = std::max(scale0, std::abs(weyl_a0(ds.domain(k))));
            scale1 = std::max(scale1, std::abs(weyl_a1(ds.domain(k))));
        }
        worst = std::max({worst, std::abs(s0) / scale0, std::abs(s1) / scale1});
    }
    return worst;
}

CheckResult check_weyl_cancellation(std::uint64_t seed, std::size_t n_sets)
{
    double const worst = weyl_residual(seed, n_sets);
    return {"Weyl cancellation", worst <= 1e-12,
            format("%zu random systems, max relative residual %.2e", n_sets, worst)};
}

//---------------------------------------------------------------------------//
Comparison factorization(std::uint64_t seed, std::size_t n_loops, std::size_t n_points)
{
    constexpr double radius = 1;
    constexpr double half_length = 2;
    Region const cylinder{AxialCylinder{radius, -half_length, half_length}};
    LoopEnsemble const ensemble{seed, n_points, n_loops};

    // Counts of (joint, transverse, longitudinal) containment.
    using Counts = std::array<std::size_t, 3>;
    std::vector<Counts> partial(n_strata(n_loops), Counts{});
    for_each_stratum(partial.size(), [&](std::size_t stratum) {
        UnitLoop loop;
        std::size_t const end = std::min(n_loops, (stratum + 1) * loops_per_stratum);
        for (std::size_t i = stratum * loops_per_stratum; i < end; ++i)
        {
            ensemble.fill(i, loop);
            // beta = 1 and x at the center: the realized loop is the unit loop.
            bool const joint = loop_in_domain(loop.points, cylinder);
            SplitLoop const parts = split(loop);
            bool const transverse = std::all_of(parts.transverse.begin(), parts.transverse.end(),
                                                [](Vec2 p) { return radial_sq(p) <= radius * radius; });
            bool const longitudinal = std::all_of(parts.longitudinal.begin(), parts.longitudinal.end(),
                                                  [](double z) { return std::abs(z) <= half_length; });
            auto& c = partial[stratum];
            c[0] += joint ? 1 : 0;
            c[1] += transverse ? 1 : 0;
            c[2] += longitudinal ? 1 : 0;
        }
    });
    Counts total{};
    for (auto const& c : partial)
    {
        for (std::size_t k = 0; k < 3; ++k)
        {
            total[k] += c[k];
        }
    }
    double const n = static_cast<double>(n_loops);
    double const pj = static_cast<double>(total[0]) / n;
    double const pt = static_cast<double>(total[1]) / n;
    double const pl = static_cast<double>(total[2]) / n;
    // Influence f = J - pl T - pt L of D = pj - pt pl; the joint indicator is
    // the product of the two marginal ones.
    double const var = pj * (1 - pj) + pl * pl * pt * (1 - pt) + pt * pt * pl * (1 - pl)
                       - 2 * pl * (pj - pj * pt) - 2 * pt * (pj - pj * pl) + 2 * pl * pt * (pj - pt * pl);
    return {"joint - product", pj, pt * pl, std::sqrt(std::max(0.0, var) / n)};
}

CheckResult check_factorization(std::uint64_t seed, std::size_t n_loops, std::size_t n_points)
{
    CheckResult r{"factorization", false, {}};
    if (n_loops < min_statistical_loops)
    {
        r.detail = under_powered("loops", n_loops, min_statistical_loops);
        return r;
    }
    Comparison const c = factorization(seed, n_loops, n_points);
    r.pass = c.within(3);
    r.detail = format("P(joint)=%.5f P(disk)P(interval)=%.5f z=%.2f", c.estimate, c.expected, c.z());
    return r;
}

//---------------------------------------------------------------------------//
ScanResult hemisphere_scan(std::uint64_t seed, std::size_t n_loops, std::size_t n_points, std::size_t n_beta)
{
    FlaskSystem const sys{1, 1, 2.5, 0.5};
    std::array<double, 3> const heights{0.2, 0.5, 1.0};
    GridPolicy policy;
    policy.n_beta = n_beta;
    return force_scan(sys, heights, policy, LoopEnsemble{seed, n_points, n_loops},
                      XSampler{XSampling::loop_adapted, seed, 1});
}

CheckResult check_hemisphere_exclusion(std::uint64_t seed,
                                       std::size_t n_loops,
                                       std::size_t n_points,
                                       std::size_t n_beta)
{
    CheckResult r{"hemisphere exclusion", false, {}};
    std::size_t const samples = n_loops * n_beta;
    if (samples < min_hemisphere_samples)
    {
        r.detail = under_powered("samples per height", samples, min_hemisphere_samples);
        return r;
    }
    ScanResult const scan = hemisphere_scan(seed, n_loops, n_points, n_beta);
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    for (auto const& e : scan.energies)
    {
        n_plus += e.n_plus;
        n_minus += e.n_minus;
    }
    r.pass = n_plus == 0;
    r.detail = format("%zu samples per height at a=0.2,0.5,1: n_plus=%zu n_minus=%zu", samples, n_plus,
                      n_minus);
    return r;
}

}  // namespace casimir::cli
