// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file bench_core.cpp
//! Hot paths of a scan: loop construction, classification, one integrand node.
#include <benchmark/benchmark.h>

#include "casimir/geometry.hpp"
#include "casimir/interaction.hpp"
#include "casimir/loops.hpp"
#include "casimir/random.hpp"

using namespace casimir;

static void BM_unit_loop(benchmark::State& state)
{
    auto const n = static_cast<std::size_t>(state.range(0));
    UnitLoop loop;
    std::uint64_t i = 0;
    for (auto _ : state)
    {
        RandomStream rs{1, StreamTag::loop_shape, i++};
        sample_unit_loop(n, rs, loop);
        benchmark::DoNotOptimize(loop.points.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_unit_loop)->Arg(1024)->Arg(4096);

static void BM_classify(benchmark::State& state)
{
    auto const ds = build_domains(FlaskSystem{1, 0.8, 2.5, 0.15});
    LoopEnsemble const ens{2, 4096, 64};
    std::vector<std::vector<Vec3>> realized;
    for (std::size_t i = 0; i < ens.size(); ++i)
    {
        realized.push_back(realize(ens.loop(i), 0.4, {0, 0, -0.3}));
    }
    std::size_t k = 0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(classify_loop(realized[k++ % realized.size()], ds));
    }
}
BENCHMARK(BM_classify);

static void BM_integrand_node(benchmark::State& state)
{
    auto const ds = build_domains(FlaskSystem{1, 0.8, 2.5, 0.15});
    LoopEnsemble const ens{3, 4096, 2000};
    XSampler const sampler{XSampling::loop_adapted, 4, 1};
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(integrand(0.4, ds, ens, sampler));
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_integrand_node)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
