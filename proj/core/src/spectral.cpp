// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file spectral.cpp
#include "casimir/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>

#include "casimir/parallel.hpp"

namespace casimir
{
namespace
{
constexpr double pi = std::numbers::pi;

void require_positive(double a, double b, char const* what)
{
    if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b))
    {
        throw std::invalid_argument(what);
    }
}

//! Relative truncation. The leading term is always kept, and an underflowed
//! term ends the series.
bool negligible(double term, double partial, TruncationPolicy const& policy)
{
    return term == 0 || std::abs(term) < policy.cutoff * std::abs(partial);
}

[[noreturn]] void too_many_terms(char const* series)
{
    throw std::runtime_error(std::string{series} + ": series did not converge within max_terms");
}

//! Sum_{n>=1} f(n) for terms that are eventually monotonically decreasing
//! in magnitude once `decaying(n)` holds.
template<class Term, class Decaying>
double sum_series(Term term, Decaying decaying, TruncationPolicy const& policy, char const* name)
{
    double total = 0;
    for (std::size_t n = 1; n <= policy.max_terms; ++n)
    {
        double const t = term(static_cast<double>(n));
        if (n > 1 && decaying(static_cast<double>(n)) && negligible(t, total, policy))
        {
            return total;
        }
        total += t;
    }
    too_many_terms(name);
}

//---------------------------------------------------------------------------//
// Bessel zeros
//---------------------------------------------------------------------------//
class BesselZeroCache
{
  public:
    double get(int m, int k)
    {
        std::lock_guard lock{mutex_};
        auto& zeros = table_[m];
        while (static_cast<int>(zeros.size()) < k)
        {
            zeros.push_back(find_next(m, zeros.empty() ? 0.0 : zeros.back()));
        }
        return zeros[k - 1];
    }

  private:
    std::mutex mutex_;
    std::map<int, std::vector<double>> table_;

    static double bessel(int m, double x) { return boost::math::cyl_bessel_j(m, x); }

    //! Zeros of J_m are at least ~3.1 apart and the first exceeds m, so a
    //! 0.5 step scan from (previous zero + 2.5) brackets exactly one zero.
    static double find_next(int m, double previous)
    {
        constexpr double step = 0.5;
        double lo = (previous > 0) ? previous + 2.5 : std::max(1.0, static_cast<double>(m));
        double f_lo = bessel(m, lo);
        for (;;)
        {
            double const hi = lo + step;
            double const f_hi = bessel(m, hi);
            if (f_hi == 0)
            {
                return hi;
            }
            if ((f_lo < 0) != (f_hi < 0))
            {
                std::uintmax_t iterations = 200;
                auto const [a, b] = boost::math::tools::toms748_solve(
                    [m](double x) { return bessel(m, x); }, lo, hi, f_lo, f_hi,
                    boost::math::tools::eps_tolerance<double>(52), iterations);
                return 0.5 * (a + b);
            }
            lo = hi;
            f_lo = f_hi;
        }
    }
};

BesselZeroCache& zero_cache()
{
    static BesselZeroCache cache;
    return cache;
}

//---------------------------------------------------------------------------//
// Monte Carlo containment
//---------------------------------------------------------------------------//
Box bounding_box(Primitive const& prim)
{
    if (auto const* b = std::get_if<Ball>(&prim))
    {
        Vec3 const r{b->radius, b->radius, b->radius};
        return {b->center - r, b->center + r};
    }
    if (auto const* c = std::get_if<AxialCylinder>(&prim))
    {
        return {{-c->radius, -c->radius, c->z_min}, {c->radius, c->radius, c->z_max}};
    }
    return std::get<Box>(prim);
}

bool encloses(Box const& outer, Box const& inner)
{
    return outer.lo.x <= inner.lo.x && outer.lo.y <= inner.lo.y && outer.lo.z <= inner.lo.z
           && outer.hi.x >= inner.hi.x && outer.hi.y >= inner.hi.y && outer.hi.z >= inner.hi.z;
}

constexpr std::size_t loops_per_stratum = 256;

}  // namespace

//---------------------------------------------------------------------------//
double phi_interval_eigsum(double s, double beta, TruncationPolicy const& policy)
{
    require_positive(s, beta, "phi_interval_eigsum requires s > 0 and beta > 0");
    double const rate = beta * pi * pi / (2 * s * s);
    return sum_series([rate](double n) { return std::exp(-rate * n * n); },
                      [](double) { return true; }, policy, "phi_interval_eigsum");
}

double phi_interval_poisson(double s, double beta, TruncationPolicy const& policy)
{
    require_positive(s, beta, "phi_interval_poisson requires s > 0 and beta > 0");
    double const rate = 2 * s * s / beta;
    double const tail = sum_series([rate](double n) { return std::exp(-rate * n * n); },
                                   [](double) { return true; }, policy, "phi_interval_poisson");
    return s / std::sqrt(2 * pi * beta) * (1 + 2 * tail);
}

double d2phi_interval_ds2(double s, double beta, TruncationPolicy const& policy)
{
    require_positive(s, beta, "d2phi_interval_ds2 requires s > 0 and beta > 0");
    if (beta <= (2 / pi) * s * s)
    {
        // d^2/ds^2 [s exp(-c s^2)] = exp(-c s^2) (4 c^2 s^3 - 6 c s), c = 2 n^2 / beta
        double const base = 2 / beta;
        double const sum = sum_series(
            [=](double n) {
                double const c = base * n * n;
                return std::exp(-c * s * s) * (4 * c * c * s * s * s - 6 * c * s);
            },
            [=](double n) { return base * n * n * s * s > 2; }, policy, "d2phi_interval_ds2");
        return 2 / std::sqrt(2 * pi * beta) * sum;
    }
    // d^2/ds^2 exp(-k / s^2) = exp(-k / s^2) (4 k^2 / s^6 - 6 k / s^4), k = beta pi^2 n^2 / 2
    double const base = beta * pi * pi / 2;
    double const s2 = s * s;
    return sum_series(
        [=](double n) {
            double const k = base * n * n;
            return std::exp(-k / s2) * (4 * k * k / (s2 * s2 * s2) - 6 * k / (s2 * s2));
        },
        [=](double n) { return base * n * n / s2 > 2; }, policy, "d2phi_interval_ds2");
}

double bessel_zero(int m, int k)
{
    if (m < 0 || k < 1)
    {
        throw std::invalid_argument("bessel_zero requires m >= 0 and k >= 1");
    }
    return zero_cache().get(m, k);
}

double phi_disk_eigsum(double r, double beta, TruncationPolicy const& policy)
{
    require_positive(r, beta, "phi_disk_eigsum requires r > 0 and beta > 0");
    double const rate = beta / (2 * r * r);
    double total = 0;
    std::size_t terms = 0;
    for (int m = 0;; ++m)
    {
        double const multiplicity = (m == 0) ? 1 : 2;
        for (int k = 1;; ++k)
        {
            double const j = bessel_zero(m, k);
            double const term = multiplicity * std::exp(-rate * j * j);
            if ((m > 0 || k > 1) && negligible(term, total, policy))
            {
                if (k == 1)
                {
                    // j_{m,1} grows with m: every higher order is smaller still.
                    return total;
                }
                break;
            }
            total += term;
            if (++terms > policy.max_terms)
            {
                too_many_terms("phi_disk_eigsum");
            }
        }
    }
}

double phi_box_eigsum(double lx, double ly, double lz, double beta, TruncationPolicy const& policy)
{
    require_positive(lx, ly, "phi_box_eigsum requires positive side lengths");
    require_positive(lz, beta, "phi_box_eigsum requires positive side lengths and beta");
    return phi_interval_eigsum(lx, beta, policy) * phi_interval_eigsum(ly, beta, policy)
           * phi_interval_eigsum(lz, beta, policy);
}

//---------------------------------------------------------------------------//
namespace
{
//! Containment counts at the full resolution and at every other point.
struct HitCounts
{
    std::size_t fine{0};
    std::size_t coarse{0};
};

std::vector<HitCounts> count_hits(Region const& domain,
                                  std::span<double const> betas,
                                  LoopEnsemble const& ensemble,
                                  Box const& sampling_box,
                                  SpectralSampling const& sampling)
{
    if (ensemble.empty())
    {
        throw std::invalid_argument("phi_mc requires a non-empty loop ensemble");
    }
    if (sampling.x_per_loop == 0)
    {
        throw std::invalid_argument("phi_mc requires at least one base point per loop");
    }
    for (double beta : betas)
    {
        if (!(beta > 0))
        {
            throw std::invalid_argument("proper time beta must be positive");
        }
    }
    for (Primitive const& part : domain.parts())
    {
        if (!encloses(sampling_box, bounding_box(part)))
        {
            throw std::invalid_argument("sampling box must contain the domain");
        }
    }

    std::size_t const n_beta = betas.size();
    std::size_t const n_loops = ensemble.size();
    std::size_t const n_strata = (n_loops + loops_per_stratum - 1) / loops_per_stratum;
    std::vector<std::vector<HitCounts>> hits(n_strata, std::vector<HitCounts>(n_beta));
    // For power-of-two sizes the first half of this order is exactly the
    // even-indexed points, i.e. the loop at half resolution.
    auto const order = coarse_to_fine_order(ensemble.n_points());
    std::size_t const half = order.size() / 2;
    Vec3 const span_box = sampling_box.hi - sampling_box.lo;

    for_each_stratum(n_strata, [&](std::size_t stratum) {
        UnitLoop loop;
        auto& counts = hits[stratum];
        std::size_t const end = std::min(n_loops, (stratum + 1) * loops_per_stratum);
        for (std::size_t i = stratum * loops_per_stratum; i < end; ++i)
        {
            ensemble.fill(i, loop);
            RandomStream xs{sampling.seed, StreamTag::spectral, i};
            for (std::size_t rep = 0; rep < sampling.x_per_loop; ++rep)
            {
                Vec3 const x{sampling_box.lo.x + span_box.x * xs.uniform(),
                             sampling_box.lo.y + span_box.y * xs.uniform(),
                             sampling_box.lo.z + span_box.z * xs.uniform()};
                if (!domain.contains(x))
                {
                    continue;
                }
                for (std::size_t b = 0; b < n_beta; ++b)
                {
                    double const scale = std::sqrt(betas[b]);
                    std::size_t scanned = 0;
                    while (scanned < order.size()
                           && domain.contains(x + scale * loop.points[order[scanned]]))
                    {
                        ++scanned;
                    }
                    counts[b].fine += (scanned == order.size()) ? 1 : 0;
                    counts[b].coarse += (scanned >= half) ? 1 : 0;
                }
            }
        }
    });

    std::vector<HitCounts> total(n_beta);
    for (auto const& counts : hits)
    {
        for (std::size_t b = 0; b < n_beta; ++b)
        {
            total[b].fine += counts[b].fine;
            total[b].coarse += counts[b].coarse;
        }
    }
    return total;
}

double phi_norm(Box const& sampling_box, double beta)
{
    return volume(sampling_box) / std::pow(2 * pi * beta, 1.5);
}

SpectralEstimate binomial(double norm, std::size_t hits, std::size_t n)
{
    double const p = static_cast<double>(hits) / static_cast<double>(n);
    return {norm * p, norm * std::sqrt(p * (1 - p) / static_cast<double>(n)), n};
}

}  // namespace

std::vector<SpectralEstimate> phi_mc(Region const& domain,
                                     std::span<double const> betas,
                                     LoopEnsemble const& ensemble,
                                     Box const& sampling_box,
                                     SpectralSampling const& sampling)
{
    auto const hits = count_hits(domain, betas, ensemble, sampling_box, sampling);
    std::size_t const n = ensemble.size() * sampling.x_per_loop;
    std::vector<SpectralEstimate> out;
    out.reserve(betas.size());
    for (std::size_t b = 0; b < betas.size(); ++b)
    {
        out.push_back(binomial(phi_norm(sampling_box, betas[b]), hits[b].fine, n));
    }
    return out;
}

std::vector<SpectralRefinement> phi_mc_refinement(Region const& domain,
                                                  std::span<double const> betas,
                                                  LoopEnsemble const& ensemble,
                                                  Box const& sampling_box,
                                                  SpectralSampling const& sampling)
{
    if (ensemble.n_points() < 4 || !std::has_single_bit(ensemble.n_points()))
    {
        throw std::invalid_argument("refinement study needs a power-of-two n_points >= 4");
    }
    auto const hits = count_hits(domain, betas, ensemble, sampling_box, sampling);
    std::size_t const n = ensemble.size() * sampling.x_per_loop;
    double const nd = static_cast<double>(n);
    // Per sample y = (sqrt2 * fine - coarse) / (sqrt2 - 1); fine implies
    // coarse, so y is 1, 0 or -1 / (sqrt2 - 1).
    double const c = 1 / (std::numbers::sqrt2 - 1);

    std::vector<SpectralRefinement> out;
    out.reserve(betas.size());
    for (std::size_t b = 0; b < betas.size(); ++b)
    {
        double const norm = phi_norm(sampling_box, betas[b]);
        SpectralRefinement r;
        r.coarse = binomial(norm, hits[b].coarse, n);
        r.fine = binomial(norm, hits[b].fine, n);
        double const p_fine = static_cast<double>(hits[b].fine) / nd;
        double const p_gap = static_cast<double>(hits[b].coarse - hits[b].fine) / nd;
        double const mean = p_fine - c * p_gap;
        double const second = p_fine + c * c * p_gap;
        double const var = std::max(0.0, second - mean * mean) / nd;
        r.extrapolated = {norm * mean, norm * std::sqrt(var), n};
        out.push_back(r);
    }
    return out;
}

SpectralEstimate phi_mc(Region const& domain,
                        double beta,
                        LoopEnsemble const& ensemble,
                        Box const& sampling_box,
                        SpectralSampling const& sampling)
{
    return phi_mc(domain, std::span<double const>{&beta, 1}, ensemble, sampling_box, sampling)
        .front();
}

}  // namespace casimir
