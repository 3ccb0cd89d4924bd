// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file interaction.cpp
#include "casimir/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "casimir/parallel.hpp"
#include "casimir/random.hpp"
#include "casimir/spectral.hpp"

namespace casimir
{
namespace
{
constexpr double pi = std::numbers::pi;
constexpr std::size_t loops_per_stratum = 256;

struct ZRange
{
    double lo;
    double hi;
};

ZRange z_range(Region const& region)
{
    ZRange out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (Primitive const& prim : region.parts())
    {
        if (auto const* b = std::get_if<Ball>(&prim))
        {
            out.lo = std::min(out.lo, b->center.z - b->radius);
            out.hi = std::max(out.hi, b->center.z + b->radius);
        }
        else if (auto const* c = std::get_if<AxialCylinder>(&prim))
        {
            out.lo = std::min(out.lo, c->z_min);
            out.hi = std::max(out.hi, c->z_max);
        }
        else
        {
            auto const& box = std::get<Box>(prim);
            out.lo = std::min(out.lo, box.lo.z);
            out.hi = std::max(out.hi, box.hi.z);
        }
    }
    return out;
}

struct Moments
{
    double sum{0};
    double sum_sq{0};

    void add(double v)
    {
        sum += v;
        sum_sq += v * v;
    }
    void merge(Moments const& other)
    {
        sum += other.sum;
        sum_sq += other.sum_sq;
    }
    double mean(double n) const { return sum / n; }
    //! Variance of the sample mean.
    double mean_variance(double n) const
    {
        if (n < 2)
        {
            return 0;
        }
        double const m = sum / n;
        return std::max(0.0, (sum_sq - n * m * m) / (n * (n - 1)));
    }
};

struct HeightTally
{
    Moments total;
    Moments plus;
    Moments minus;
    std::size_t n_plus{0};
    std::size_t n_minus{0};
};

//! Sums for one proper-time node: one entry per piston height, plus the
//! per-sample differences between neighboring heights.
struct NodeTally
{
    std::vector<HeightTally> heights;
    std::vector<Moments> steps;

    explicit NodeTally(std::size_t n_heights) : heights(n_heights), steps(n_heights ? n_heights - 1 : 0)
    {
    }

    void merge(NodeTally const& other)
    {
        for (std::size_t k = 0; k < heights.size(); ++k)
        {
            heights[k].total.merge(other.heights[k].total);
            heights[k].plus.merge(other.heights[k].plus);
            heights[k].minus.merge(other.heights[k].minus);
            heights[k].n_plus += other.heights[k].n_plus;
            heights[k].n_minus += other.heights[k].n_minus;
        }
        for (std::size_t k = 0; k < steps.size(); ++k)
        {
            steps[k].merge(other.steps[k]);
        }
    }
};

//---------------------------------------------------------------------------//
/*!
 * Accumulates weighted loop classifications over (beta node, loop, base
 * point) for several piston heights at once.
 *
 * Above the piston a loop is in neither D0 nor D1, so its weight is
 * b3 - b2, which does not depend on the piston height; a loop that stays at
 * or below the piston has weight zero. One containment scan per sample thus
 * serves every height.
 */
class PistonEngine
{
  public:
    PistonEngine(DomainSet const& ds,
                 std::span<double const> heights,
                 std::span<double const> betas,
                 LoopEnsemble const& ensemble,
                 XSampler const& sampler)
        : ds_{ds}
        , heights_{heights}
        , betas_{betas}
        , ensemble_{ensemble}
        , sampler_{sampler}
        , cylinder_z_{z_range(ds.cylinder)}
        , flask_z_{z_range(ds.flask)}
        , order_{coarse_to_fine_order(ensemble.n_points())}
    {
        if (ensemble.empty())
        {
            throw std::invalid_argument("energy estimates require a non-empty loop ensemble");
        }
        if (sampler.per_loop == 0)
        {
            throw std::invalid_argument("at least one base point per loop is required");
        }
        if (heights.empty() || !std::is_sorted(heights.begin(), heights.end()))
        {
            throw std::invalid_argument("piston heights must be non-empty and increasing");
        }
        for (double beta : betas)
        {
            if (!(beta > 0))
            {
                throw std::invalid_argument("proper time beta must be positive");
            }
        }
    }

    std::vector<NodeTally> run() const
    {
        std::size_t const n_loops = ensemble_.size();
        std::size_t const n_strata = (n_loops + loops_per_stratum - 1) / loops_per_stratum;
        std::vector<std::vector<NodeTally>> partial(
            n_strata, std::vector<NodeTally>(betas_.size(), NodeTally{heights_.size()}));

        for_each_stratum(n_strata, [&](std::size_t stratum) {
            UnitLoop loop;
            std::size_t const end = std::min(n_loops, (stratum + 1) * loops_per_stratum);
            for (std::size_t i = stratum * loops_per_stratum; i < end; ++i)
            {
                ensemble_.fill(i, loop);
                LoopShape const shape = summarize(loop);
                for (std::size_t j = 0; j < betas_.size(); ++j)
                {
                    accumulate(loop, shape, i, j, partial[stratum][j]);
                }
            }
        });

        std::vector<NodeTally> total(betas_.size(), NodeTally{heights_.size()});
        for (auto const& stratum : partial)
        {
            for (std::size_t j = 0; j < total.size(); ++j)
            {
                total[j].merge(stratum[j]);
            }
        }
        return total;
    }

    double samples_per_node() const
    {
        return static_cast<double>(ensemble_.size() * sampler_.per_loop);
    }

  private:
    DomainSet const& ds_;
    std::span<double const> heights_;
    std::span<double const> betas_;
    LoopEnsemble const& ensemble_;
    XSampler sampler_;
    ZRange cylinder_z_;
    ZRange flask_z_;
    std::vector<std::uint32_t> order_;

    struct Draw
    {
        Vec3 x;
        double volume{0};
        bool feasible{false};
    };

    Draw draw(RandomStream& xs, UnitLoop const& loop, LoopShape const& shape, double scale) const
    {
        // Four uniforms per draw keep every base point on its own Philox block.
        double const u_radius = xs.uniform();
        double const u_angle = xs.uniform();
        double const u_z = xs.uniform();
        xs.uniform();

        if (sampler_.mode == XSampling::uniform)
        {
            AxialCylinder const& c = ds_.sampling_region;
            double const rho = c.radius * std::sqrt(u_radius);
            double const phi = 2 * pi * u_angle;
            return {{rho * std::cos(phi), rho * std::sin(phi), c.z_min + (c.z_max - c.z_min) * u_z},
                    ds_.sampling_volume,
                    true};
        }

        if (!ds_.junction_z)
        {
            return {};
        }
        double const z_lo = std::max(heights_.front() - scale * shape.z_max,
                                     ds_.floor_z - scale * shape.z_min);
        double const z_hi = std::min(ds_.ceiling_z - scale * shape.z_max,
                                     *ds_.junction_z - scale * shape.z_min);
        if (!(z_hi > z_lo))
        {
            return {};
        }
        // The loop top lies above the piston, where D2 and D3 are both the
        // neck cylinder: x_perp + scale * top_perp must be inside the neck.
        Vec3 const top = loop.points[shape.top_index];
        double const r = ds_.neck_radius;
        double const rho = r * std::sqrt(u_radius);
        double const phi = 2 * pi * u_angle;
        return {{-scale * top.x + rho * std::cos(phi), -scale * top.y + rho * std::sin(phi),
                 z_lo + (z_hi - z_lo) * u_z},
                pi * r * r * (z_hi - z_lo),
                true};
    }

    //! b3 - b2 for the realized loop.
    int base_weight(Vec3 x, double scale, UnitLoop const& loop, LoopShape const& shape) const
    {
        if (!ds_.junction_z)
        {
            return 0;
        }
        double const z_min = x.z + scale * shape.z_min;
        double const z_max = x.z + scale * shape.z_max;
        if (z_min > *ds_.junction_z)
        {
            return 0;
        }
        bool in_cylinder = z_min >= cylinder_z_.lo && z_max <= cylinder_z_.hi;
        bool in_flask = z_min >= flask_z_.lo && z_max <= flask_z_.hi;
        for (std::uint32_t j : order_)
        {
            if (!in_cylinder && !in_flask)
            {
                break;
            }
            Vec3 const p = x + scale * loop.points[j];
            in_cylinder = in_cylinder && ds_.cylinder.contains(p);
            in_flask = in_flask && ds_.flask.contains(p);
        }
        return int{in_flask} - int{in_cylinder};
    }

    void accumulate(UnitLoop const& loop,
                    LoopShape const& shape,
                    std::size_t loop_index,
                    std::size_t node,
                    NodeTally& tally) const
    {
        double const scale = std::sqrt(betas_[node]);
        RandomStream xs{sampler_.seed, StreamTag::base_point, loop_index,
                        static_cast<std::uint32_t>(node)};
        for (std::size_t rep = 0; rep < sampler_.per_loop; ++rep)
        {
            Draw const d = draw(xs, loop, shape, scale);
            if (!d.feasible)
            {
                continue;
            }
            int const base = base_weight(d.x, scale, loop, shape);
            if (base == 0)
            {
                continue;
            }
            double const top = d.x.z + scale * shape.z_max;
            double const extent = scale * (shape.z_max - shape.z_min);
            double previous = 0;
            for (std::size_t k = 0; k < heights_.size(); ++k)
            {
                int const w = (top > heights_[k]) ? base : 0;
                if (w != 0 && extent < heights_[k] * (1 - 1e-12))
                {
                    throw std::logic_error("contributing loop shorter than the piston height");
                }
                double const v = d.volume * w;
                HeightTally& h = tally.heights[k];
                if (w > 0)
                {
                    h.total.add(v);
                    h.plus.add(v);
                    ++h.n_plus;
                }
                else if (w < 0)
                {
                    h.total.add(v);
                    h.minus.add(v);
                    ++h.n_minus;
                }
                if (k > 0 && v != previous)
                {
                    tally.steps[k - 1].add(v - previous);
                }
                previous = v;
            }
        }
    }
};

double integrand_prefactor(double beta)
{
    return 1 / (8 * pi * pi * beta * beta * beta);
}

IntegrandValue node_value(double beta, HeightTally const& h, double n)
{
    double const c = integrand_prefactor(beta);
    IntegrandValue out;
    out.beta = beta;
    out.plus = c * h.plus.mean(n);
    out.minus = c * h.minus.mean(n);
    out.value = out.plus + out.minus;
    out.std_error = c * std::sqrt(h.total.mean_variance(n));
    out.n_plus = h.n_plus;
    out.n_minus = h.n_minus;
    out.n_null = static_cast<std::size_t>(n) - h.n_plus - h.n_minus;
    return out;
}

EnergyEstimate integrate(BetaGrid const& grid, std::vector<NodeTally> const& nodes, std::size_t k, double n)
{
    EnergyEstimate e;
    double var = 0;
    double var_plus = 0;
    double var_minus = 0;
    for (std::size_t j = 0; j < grid.size(); ++j)
    {
        HeightTally const& h = nodes[j].heights[k];
        IntegrandValue const iv = node_value(grid.nodes[j], h, n);
        double const q = grid.weights[j];
        double const c = integrand_prefactor(grid.nodes[j]);
        e.plus_component += q * iv.plus;
        e.minus_component += q * iv.minus;
        var += q * q * iv.std_error * iv.std_error;
        var_plus += q * q * c * c * h.plus.mean_variance(n);
        var_minus += q * q * c * c * h.minus.mean_variance(n);
        e.n_plus += iv.n_plus;
        e.n_minus += iv.n_minus;
        e.n_null += iv.n_null;
        e.integrand.push_back(iv);
    }
    e.value = e.plus_component + e.minus_component;
    e.std_error = std::sqrt(var);
    e.plus_std_error = std::sqrt(var_plus);
    e.minus_std_error = std::sqrt(var_minus);

    double const du = grid.log_step();
    auto cell = [&](std::size_t j) {
        return 0.5 * du
               * (grid.nodes[j] * e.integrand[j].value + grid.nodes[j + 1] * e.integrand[j + 1].value);
    };
    double const threshold = std::max(0.05 * e.std_error, 1e-3 * std::abs(e.value));
    e.tail_warning = std::abs(cell(0)) > threshold || std::abs(cell(grid.size() - 2)) > threshold;
    return e;
}

void require_grid(BetaGrid const& grid)
{
    if (grid.size() < 3 || grid.weights.size() != grid.size())
    {
        throw std::invalid_argument("proper-time grid needs at least 3 nodes with weights");
    }
}

}  // namespace

//---------------------------------------------------------------------------//
BetaGrid BetaGrid::log_spaced(double beta_min, double beta_max, std::size_t count)
{
    if (!(beta_min > 0) || !(beta_max > beta_min) || !std::isfinite(beta_max) || count < 3)
    {
        throw std::invalid_argument("log grid requires 0 < beta_min < beta_max and >= 3 nodes");
    }
    BetaGrid grid;
    double const lo = std::log(beta_min);
    double const du = (std::log(beta_max) - lo) / static_cast<double>(count - 1);
    for (std::size_t j = 0; j < count; ++j)
    {
        double const beta = (j + 1 == count) ? beta_max : std::exp(lo + du * static_cast<double>(j));
        double const end_factor = (j == 0 || j + 1 == count) ? 0.5 : 1.0;
        grid.nodes.push_back(beta);
        grid.weights.push_back(end_factor * du * beta);
    }
    return grid;
}

double BetaGrid::log_step() const
{
    return std::log(nodes.back() / nodes.front()) / static_cast<double>(nodes.size() - 1);
}

BetaGrid make_grid(double bulb_radius, double a_min, double a_max, GridPolicy const& policy)
{
    if (!(policy.min_factor > 0) || !(policy.max_factor > 0))
    {
        throw std::invalid_argument("grid factors must be positive");
    }
    return BetaGrid::log_spaced(policy.min_factor * a_min * a_min,
                                policy.max_factor * (2 * bulb_radius + a_max) * (2 * bulb_radius + a_max),
                                policy.n_beta);
}

BetaGrid make_grid(FlaskSystem const& sys, GridPolicy const& policy)
{
    return make_grid(sys.bulb_radius, sys.piston_height, sys.piston_height, policy);
}

char const* to_string(XSampling mode)
{
    return mode == XSampling::uniform ? "uniform" : "loop_adapted";
}

//---------------------------------------------------------------------------//
int sample_weight(Vec3 x, double beta, UnitLoop const& loop, DomainSet const& ds)
{
    auto const points = realize(loop, beta, x);
    return weight(classify_loop(points, ds));
}

IntegrandValue integrand(double beta,
                         DomainSet const& ds,
                         LoopEnsemble const& ensemble,
                         XSampler const& sampler)
{
    double const height = ds.piston_z;
    PistonEngine const engine{ds, {&height, 1}, {&beta, 1}, ensemble, sampler};
    auto const nodes = engine.run();
    return node_value(beta, nodes.front().heights.front(), engine.samples_per_node());
}

EnergyEstimate estimate_energy(DomainSet const& ds,
                               BetaGrid const& grid,
                               LoopEnsemble const& ensemble,
                               XSampler const& sampler)
{
    require_grid(grid);
    double const height = ds.piston_z;
    PistonEngine const engine{ds, {&height, 1}, grid.nodes, ensemble, sampler};
    return integrate(grid, engine.run(), 0, engine.samples_per_node());
}

EnergyEstimate estimate_energy(FlaskSystem const& sys,
                               BetaGrid const& grid,
                               LoopEnsemble const& ensemble,
                               XSampler const& sampler)
{
    return estimate_energy(build_domains(sys), grid, ensemble, sampler);
}

ScanResult force_scan(FlaskSystem const& sys,
                      std::span<double const> heights,
                      GridPolicy const& grid_policy,
                      LoopEnsemble const& ensemble,
                      XSampler const& sampler,
                      Shape shape)
{
    if (heights.size() < 3)
    {
        throw std::invalid_argument("a force scan needs at least 3 piston heights");
    }
    for (std::size_t k = 0; k < heights.size(); ++k)
    {
        if (!(heights[k] > 0 && heights[k] < sys.neck_length))
        {
            throw std::invalid_argument("scan heights must lie in (0, L)");
        }
        if (k > 0 && !(heights[k] > heights[k - 1]))
        {
            throw std::invalid_argument("scan heights must be strictly increasing");
        }
    }

    FlaskSystem lowest = sys;
    lowest.piston_height = heights.front();
    DomainSet const ds = (shape == Shape::flask)
                             ? build_domains(lowest)
                             : build_reference_domains(sys.neck_radius, sys.neck_length,
                                                       heights.front());

    ScanResult result;
    result.heights.assign(heights.begin(), heights.end());
    result.grid = make_grid(sys.bulb_radius, heights.front(), heights.back(), grid_policy);

    PistonEngine const engine{ds, result.heights, result.grid.nodes, ensemble, sampler};
    auto const nodes = engine.run();
    double const n = engine.samples_per_node();
    for (std::size_t k = 0; k < heights.size(); ++k)
    {
        result.energies.push_back(integrate(result.grid, nodes, k, n));
    }

    for (std::size_t k = 0; k + 1 < heights.size(); ++k)
    {
        double const da = heights[k + 1] - heights[k];
        double var = 0;
        for (std::size_t j = 0; j < result.grid.size(); ++j)
        {
            double const qc = result.grid.weights[j] * integrand_prefactor(result.grid.nodes[j]);
            var += qc * qc * nodes[j].steps[k].mean_variance(n);
        }
        result.forces.push_back({0.5 * (heights[k] + heights[k + 1]),
                                 (result.energies[k].value - result.energies[k + 1].value) / da,
                                 std::sqrt(var) / da});
    }

    for (std::size_t k = 0; k + 1 < result.forces.size(); ++k)
    {
        ForcePoint const& lo = result.forces[k];
        ForcePoint const& hi = result.forces[k + 1];
        bool const significant = std::abs(lo.value) > lo.std_error && std::abs(hi.value) > hi.std_error;
        if (significant && (lo.value > 0) != (hi.value > 0))
        {
            result.equilibrium = Bracket{lo.a, hi.a, 0.5 * (lo.a + hi.a)};
            break;
        }
    }
    return result;
}

//---------------------------------------------------------------------------//
double plate_bound(double r, double d)
{
    if (!(r > 0) || !(d > 0))
    {
        throw std::invalid_argument("plate_bound requires r > 0 and d > 0");
    }
    return -std::pow(pi, 3) * r * r / (1440 * d * d * d);
}

double asymptotic_minus_inner(double d, double beta)
{
    if (!(d > 0) || !(beta > 0))
    {
        throw std::invalid_argument("asymptotic_minus_inner requires d > 0 and beta > 0");
    }
    // Beyond s^2 = d^2 + 25 beta the integrand is below exp(-50) of its value
    // near the lower limit.
    double const s_max = std::sqrt(d * d + 25 * beta);
    double error = 0;
    double const integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [d, beta](double s) { return (s - d) * d2phi_interval_ds2(s, beta); }, d, s_max, 20, 1e-12,
        &error);
    return integral / (2 * std::sqrt(2 * pi) * std::pow(beta, 1.5));
}

AsymptoticEstimate asymptotic_minus(FlaskSystem const& sys)
{
    sys.validate();
    AsymptoticEstimate out
        = asymptotic_minus(sys.neck_radius, sys.bulb_radius, sys.piston_height);
    out.regime_ok = out.regime_ok && sys.neck_length >= 4 * sys.bulb_radius;
    return out;
}

AsymptoticEstimate asymptotic_minus(double neck_radius, double bulb_radius, double piston_height)
{
    if (!(neck_radius > 0) || !(bulb_radius > 0) || !(piston_height > 0))
    {
        throw std::invalid_argument("asymptotic_minus requires r, R, a > 0");
    }
    double const r = neck_radius;
    double const d = 2 * bulb_radius + piston_height;

    // Integrand in u = ln(beta); the beta factor is the Jacobian.
    auto integrand_u = [&](double u) {
        double const beta = std::exp(u);
        double const inner = asymptotic_minus_inner(d, beta);
        if (inner == 0)
        {
            return 0.0;
        }
        return beta * phi_disk_eigsum(r, beta) * inner;
    };

    // Below 2 d^2 / 745 the longitudinal factor underflows; above
    // 1490 r^2 / j01^2 the disk trace does.
    double const j01 = bessel_zero(0, 1);
    double const u_lo = std::log(2 * d * d / 745);
    double const u_hi = std::log(std::max(1490 * r * r / (j01 * j01), 100 * d * d));
    constexpr double coarse_step = 0.25;
    std::vector<double> us;
    std::vector<double> gs;
    for (double u = u_lo; u <= u_hi + coarse_step; u += coarse_step)
    {
        us.push_back(u);
        gs.push_back(std::abs(integrand_u(u)));
    }
    double const peak = *std::max_element(gs.begin(), gs.end());
    AsymptoticEstimate out;
    out.regime_ok = bulb_radius >= 4 * neck_radius;
    if (peak == 0)
    {
        return out;
    }
    std::size_t first = 0;
    std::size_t last = gs.size() - 1;
    while (gs[first] < 1e-16 * peak)
    {
        ++first;
    }
    while (gs[last] < 1e-16 * peak)
    {
        --last;
    }
    double const a = us[first > 0 ? first - 1 : 0];
    double const b = us[std::min(last + 1, us.size() - 1)];

    constexpr double tolerance = 1e-9;
    double error = 0;
    double const integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand_u, a, b, 20, tolerance, &error);
    out.value = -integral;
    out.error = error;
    if (!(error <= 1e3 * tolerance * std::abs(integral)))
    {
        std::ostringstream msg;
        msg << "asymptotic_minus quadrature did not converge: achieved relative error "
            << error / std::abs(integral);
        throw std::runtime_error(msg.str());
    }
    return out;
}

}  // namespace casimir
