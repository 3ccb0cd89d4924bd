// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file test_loops.cpp
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "casimir/geometry.hpp"
#include "casimir/loops.hpp"
#include "casimir/parallel.hpp"
#include "casimir/random.hpp"

using namespace casimir;

namespace
{
//! Mean of x_s * x_t with its standard error (the mean of x is zero).
struct Moment
{
    double mean;
    double se;
};

Moment product_moment(std::size_t n_points, std::size_t n_loops, std::size_t s, std::size_t t, std::uint64_t seed)
{
    LoopEnsemble const ens{seed, n_points, n_loops};
    double sum = 0;
    double sum_sq = 0;
    UnitLoop loop;
    for (std::size_t i = 0; i < n_loops; ++i)
    {
        ens.fill(i, loop);
        double const v = loop.points[s].x * loop.points[t].x;
        sum += v;
        sum_sq += v * v;
    }
    double const n = static_cast<double>(n_loops);
    double const mean = sum / n;
    return {mean, std::sqrt((sum_sq / n - mean * mean) / n)};
}

//! Brownian bridge on [0, beta] built independently: a random walk with
//! N(0, beta/N) steps, pinned by W_t - (t / beta) W_beta.
std::vector<double> direct_bridge(std::size_t n, double beta, std::mt19937_64& gen)
{
    std::normal_distribution<double> step{0, std::sqrt(beta / static_cast<double>(n))};
    std::vector<double> w(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i)
    {
        w[i] = w[i - 1] + step(gen);
    }
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        b[i] = w[i] - static_cast<double>(i) / static_cast<double>(n) * w[n];
    }
    return b;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers")
{
    // Random123 known-answer vectors.
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::apply(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff})
          == C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0})
          == C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("random streams are reproducible and distinct")
{
    RandomStream a{5, StreamTag::loop_shape, 17};
    RandomStream b{5, StreamTag::loop_shape, 17};
    RandomStream c{5, StreamTag::loop_shape, 18};
    RandomStream d{5, StreamTag::base_point, 17};
    std::vector<std::uint32_t> va, vb, vc, vd;
    for (int i = 0; i < 64; ++i)
    {
        va.push_back(a.next_bits());
        vb.push_back(b.next_bits());
        vc.push_back(c.next_bits());
        vd.push_back(d.next_bits());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    CHECK(va != vd);

    RandomStream u{1, StreamTag::test, 0};
    double sum = 0;
    for (int i = 0; i < 100000; ++i)
    {
        double const x = u.uniform();
        REQUIRE(x > 0);
        REQUIRE(x < 1);
        sum += x;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sample_unit_loop: basic structure")
{
    RandomStream rs{1, StreamTag::test, 0};
    CHECK_THROWS_AS(sample_unit_loop(1, rs), std::invalid_argument);
    CHECK_THROWS_AS(LoopEnsemble(1, 1, 10), std::invalid_argument);

    for (std::size_t n : {2u, 3u, 8u, 100u, 1024u})
    {
        RandomStream s{2, StreamTag::test, n};
        UnitLoop const loop = sample_unit_loop(n, s);
        CHECK(loop.size() == n);
        CHECK(loop.points.front() == Vec3{});
        for (auto const& p : loop.points)
        {
            CHECK(is_finite(p));
        }
    }
}

TEST_CASE("bridge law: n_points=2 midpoint variance and mean")
{
    std::size_t const n = 100000;
    auto const m = product_moment(2, n, 1, 1, 31);
    CHECK(std::abs(m.mean - 0.25) <= 3 * m.se);

    LoopEnsemble const ens{32, 4, n};
    double sum = 0;
    double sum_sq = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const v = ens.loop(i).points[2].y;
        sum += v;
        sum_sq += v * v;
    }
    double const mean = sum / n;
    double const se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 3 * se);
}

TEST_CASE("bridge law: covariances at several sample times")
{
    std::size_t const n = 50000;
    struct Case
    {
        std::size_t n_points, s, t;
    };
    // Dyadic construction plus the sequential one for other sizes.
    for (Case c : {Case{4, 1, 3}, Case{4, 1, 2}, Case{4, 2, 2}, Case{16, 3, 11}, Case{6, 1, 4}, Case{6, 5, 5},
                   Case{12, 2, 9}})
    {
        double const s = static_cast<double>(c.s) / static_cast<double>(c.n_points);
        double const t = static_cast<double>(c.t) / static_cast<double>(c.n_points);
        double const exact = std::min(s, t) - s * t;
        auto const m = product_moment(c.n_points, n, c.s, c.t, 100 + c.n_points + c.s);
        CAPTURE(c.n_points);
        CAPTURE(c.s);
        CAPTURE(c.t);
        CHECK(std::abs(m.mean - exact) <= 3 * m.se);
    }
}

TEST_CASE("nested refinement: N points are the even points of 2N")
{
    for (std::uint64_t i = 0; i < 20; ++i)
    {
        UnitLoop const coarse = LoopEnsemble{9, 256, 20}.loop(i);
        UnitLoop const fine = LoopEnsemble{9, 512, 20}.loop(i);
        for (std::size_t k = 0; k < coarse.size(); ++k)
        {
            REQUIRE(coarse.points[k] == fine.points[2 * k]);
        }
    }
}

TEST_CASE("coarse_to_fine_order")
{
    for (std::size_t n : {2u, 8u, 64u, 4096u})
    {
        auto const order = coarse_to_fine_order(n);
        REQUIRE(order.size() == n);
        std::set<std::uint32_t> seen(order.begin(), order.end());
        CHECK(seen.size() == n);
        CHECK(*seen.rbegin() == n - 1);
        for (std::size_t k = 0; k < n / 2; ++k)
        {
            CHECK(order[k] % 2 == 0);
        }
    }
    auto const plain = coarse_to_fine_order(6);
    CHECK(plain == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("ensemble determinism across access order and worker count")
{
    LoopEnsemble const ens{77, 64, 300};
    std::vector<UnitLoop> forward;
    for (std::size_t i = 0; i < ens.size(); ++i)
    {
        forward.push_back(ens.loop(i));
    }
    for (unsigned workers : {1u, 3u})
    {
        std::vector<UnitLoop> got(ens.size());
        for_each_stratum(ens.size(), [&](std::size_t i) { got[ens.size() - 1 - i] = ens.loop(ens.size() - 1 - i); },
                         workers);
        for (std::size_t i = 0; i < ens.size(); ++i)
        {
            REQUIRE(got[i].points == forward[i].points);
        }
    }
}

TEST_CASE("realize: examples")
{
    UnitLoop loop{{Vec3{0, 0, 0}, Vec3{0.5, 0, 0}}};
    auto const pts = realize(loop, 4, {1, 2, 3});
    CHECK(pts[0] == Vec3{1, 2, 3});
    CHECK(pts[1] == Vec3{2, 2, 3});

    LoopEnsemble const ens{3, 128, 1};
    UnitLoop const u = ens.loop(0);
    CHECK(realize(u, 1, {}) == u.points);

    double const range1 = extent(u.points, Axis::z).range();
    auto const r9 = realize(u, 9, {0.3, -2, 7});
    CHECK(extent(r9, Axis::z).range() == doctest::Approx(3 * range1).epsilon(1e-14));
    CHECK(extent(realize(u, 9, {5, 5, -40}), Axis::z).range()
          == doctest::Approx(extent(r9, Axis::z).range()).epsilon(1e-13));

    CHECK_THROWS_AS(realize(u, 0, {}), std::invalid_argument);
    CHECK_THROWS_AS(realize(u, -1, {}), std::invalid_argument);
}

TEST_CASE("extent: examples")
{
    std::vector<Vec3> constant(4, Vec3{});
    Extent1D const e0 = extent(constant, Axis::z);
    CHECK(e0.min == 0);
    CHECK(e0.max == 0);
    CHECK(e0.range() == 0);
    std::vector<Vec3> two{{0, 0, 0}, {0, 0, 1.5}};
    CHECK(extent(two, Axis::z).range() == 1.5);
    CHECK(extent(two, Axis::x).range() == 0);
    CHECK_THROWS(extent(std::vector<Vec3>{}, Axis::z));

    LoopEnsemble const ens{4, 64, 50};
    for (std::size_t i = 0; i < ens.size(); ++i)
    {
        auto const e = extent(ens.loop(i).points, Axis::y);
        CHECK(e.min <= 0);
        CHECK(e.max >= 0);
    }
}

TEST_CASE("split / recombine")
{
    LoopEnsemble const ens{5, 64, 10};
    for (std::size_t i = 0; i < ens.size(); ++i)
    {
        UnitLoop const loop = ens.loop(i);
        SplitLoop const parts = split(loop);
        REQUIRE(parts.transverse.size() == loop.size());
        CHECK(parts.transverse[3].x == loop.points[3].x);
        CHECK(parts.longitudinal[3] == loop.points[3].z);
        CHECK(recombine(parts).points == loop.points);
    }

    SplitLoop bad;
    bad.transverse.resize(3);
    bad.longitudinal.resize(2);
    CHECK_THROWS(recombine(bad));
}

TEST_CASE("split: cylinder containment factorizes pointwise")
{
    LoopEnsemble const ens{6, 64, 2000};
    Region const cyl{AxialCylinder{1, -0.8, 1.1}};
    int inside = 0;
    for (std::size_t i = 0; i < ens.size(); ++i)
    {
        UnitLoop const loop = ens.loop(i);
        auto const pts = realize(loop, 1.5, {0.1, 0, 0.2});
        SplitLoop const parts = split(UnitLoop{pts});
        bool const disk = std::all_of(parts.transverse.begin(), parts.transverse.end(),
                                      [](Vec2 p) { return radial_sq(p) <= 1; });
        bool const interval = std::all_of(parts.longitudinal.begin(), parts.longitudinal.end(),
                                          [](double z) { return z >= -0.8 && z <= 1.1; });
        bool const joint = loop_in_domain(pts, cyl);
        CHECK(joint == (disk && interval));
        inside += joint;
    }
    CHECK(inside > 0);
}

TEST_CASE("split: transverse radius and longitudinal range are uncorrelated")
{
    std::size_t const n = 20000;
    LoopEnsemble const ens{8, 64, n};
    std::vector<double> rad(n), rng(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        SplitLoop const parts = split(ens.loop(i));
        double m = 0;
        for (Vec2 p : parts.transverse)
        {
            m = std::max(m, radial_sq(p));
        }
        rad[i] = std::sqrt(m);
        auto [lo, hi] = std::minmax_element(parts.longitudinal.begin(), parts.longitudinal.end());
        rng[i] = *hi - *lo;
    }
    auto mean = [](std::vector<double> const& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    double const mr = mean(rad);
    double const mg = mean(rng);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxy += (rad[i] - mr) * (rng[i] - mg);
        sxx += (rad[i] - mr) * (rad[i] - mr);
        syy += (rng[i] - mg) * (rng[i] - mg);
    }
    double const corr = sxy / std::sqrt(sxx * syy);
    // Under independence the sample correlation has standard error 1/sqrt(n).
    CHECK(std::abs(corr) <= 3 / std::sqrt(double(n)));
}

TEST_CASE("scaling law: scaled unit loops match bridges sampled at beta")
{
    std::size_t const n = 20000;
    std::size_t const n_points = 64;
    double const beta = 2.7;
    LoopEnsemble const ens{10, n_points, n};
    std::mt19937_64 gen{99};

    double s1 = 0, q1 = 0, s2 = 0, q2 = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const a = extent(realize(ens.loop(i), beta, {}), Axis::z).range();
        auto const b = direct_bridge(n_points, beta, gen);
        auto [lo, hi] = std::minmax_element(b.begin(), b.end());
        double const c = *hi - *lo;
        s1 += a;
        q1 += a * a;
        s2 += c;
        q2 += c * c;
    }
    double const m1 = s1 / n;
    double const m2 = s2 / n;
    double const se = std::sqrt((q1 / n - m1 * m1) / n + (q2 / n - m2 * m2) / n);
    CHECK(std::abs(m1 - m2) <= 3 * se);
}

TEST_CASE("ensemble cache round trip and corruption")
{
    auto const dir = std::filesystem::temp_directory_path() / "casimir_test_loops";
    std::filesystem::create_directories(dir);
    auto const path = dir / "ens.bin";

    LoopEnsemble const ens{123, 16, 7};
    write_ensemble(path, ens);
    CHECK(std::filesystem::file_size(path) == 8 + 4 + 4 + 8 * 3 + 7 * 16 * 24);

    LoopEnsemble const back = read_ensemble(path);
    CHECK(back.is_stored());
    CHECK(back.seed() == 123);
    CHECK(back.n_points() == 16);
    CHECK(back.size() == 7);
    for (std::size_t i = 0; i < 7; ++i)
    {
        CHECK(back.loop(i).points == ens.loop(i).points);
    }

    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XASLOOPS", 8);
    }
    CHECK_THROWS(read_ensemble(path));

    write_ensemble(path, ens);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        std::uint32_t const v = 99;
        f.write(reinterpret_cast<char const*>(&v), 4);
    }
    CHECK_THROWS(read_ensemble(path));

    write_ensemble(path, ens);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 10);
    CHECK_THROWS(read_ensemble(path));

    CHECK_THROWS(read_ensemble(dir / "missing.bin"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("summarize")
{
    UnitLoop loop{{Vec3{0, 0, 0}, Vec3{0, 0, 0.7}, Vec3{0, 0, -0.2}, Vec3{1, 0, 0.3}}};
    LoopShape const s = summarize(loop);
    CHECK(s.z_min == -0.2);
    CHECK(s.z_max == 0.7);
    CHECK(s.top_index == 1);
}

TEST_CASE("parse_thread_count")
{
    CHECK(parse_thread_count("4") == 4);
    CHECK_THROWS_AS(parse_thread_count("0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_thread_count("-2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_thread_count("two"), std::invalid_argument);
    CHECK_THROWS_AS(parse_thread_count(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_thread_count("3x"), std::invalid_argument);
}

TEST_CASE("for_each_stratum covers every stratum once and rethrows")
{
    std::vector<int> hits(1000, 0);
    for_each_stratum(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

    CHECK_THROWS_AS(for_each_stratum(
                        50,
                        [](std::size_t i) {
                            if (i == 17)
                                throw std::runtime_error("boom");
                        },
                        3),
                    std::runtime_error);
}
