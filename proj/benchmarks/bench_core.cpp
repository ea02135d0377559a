#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fiberguide/dynamics.hpp"
#include "fiberguide/ensemble.hpp"
#include "fiberguide/potential.hpp"

using namespace fiberguide;

namespace {

std::vector<Vec3> random_points(std::size_t n)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ur(-10e-6, 10e-6), uz(-300e-6, 0.088);
    std::vector<Vec3> out(n);
    for (auto& p : out) p = {ur(rng), ur(rng), uz(rng)};
    return out;
}

FieldConfig all_terms()
{
    FieldConfig c;
    c.barrier.enabled = true;
    c.reservoir.enabled = true;
    c.reservoir.focus_position = {0.0, 0.0, -100e-6};
    c.gravity_axis = Vec3{0.0, 1.0, 0.0};
    return c;
}

void BM_FieldSample(benchmark::State& state)
{
    const Field f{state.range(0) ? all_terms() : FieldConfig{}};
    const auto pts = random_points(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.sample(pts[i++ & 1023]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FieldSample)->Arg(0)->Arg(1);

void BM_Step(benchmark::State& state)
{
    const Field f{FieldConfig{}};
    const auto sp = rubidium85();
    AtomState s;
    s.position = {0.5e-6, 0.0, 0.01};
    s.velocity = {0.0, 0.0, 1.2};
    for (auto _ : state) {
        s = step(s, 2e-7, f, sp);
        if (s.position.z > 0.08) s.position.z = 0.01;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step);

void BM_StepWithScattering(benchmark::State& state)
{
    const Field f{FieldConfig{}};
    const auto sp = rubidium85();
    Rng rng(3);
    AtomState s;
    s.position = {0.5e-6, 0.0, 0.01};
    s.velocity = {0.0, 0.0, 1.2};
    for (auto _ : state) {
        s = maybe_scatter(step(s, 2e-7, f, sp), 2e-7, f, sp, rng);
        if (s.position.z > 0.08) s.position.z = 0.01;
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepWithScattering);

// One full funnel-to-exit transit, about 4e5 steps.
void BM_PropagateTransit(benchmark::State& state)
{
    const Field f{FieldConfig{}};
    const auto sp = rubidium85();
    AtomState s;
    s.position = {0.5e-6, 0.0, -60e-6};
    IntegratorParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate(s, f, sp, p, 1));
    }
}
BENCHMARK(BM_PropagateTransit)->Unit(benchmark::kMillisecond);

void BM_SampleCloud(benchmark::State& state)
{
    CloudConfig c;
    c.n_atoms = 1e6;
    const auto sp = rubidium85();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_cloud(c, sp, static_cast<std::size_t>(state.range(0)), 7));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleCloud)->Arg(1000)->Arg(100000);

} // namespace

BENCHMARK_MAIN();
