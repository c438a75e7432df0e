#include <benchmark/benchmark.h>

#include "conewalk/kernel.hpp"
#include "conewalk/model.hpp"
#include "conewalk/sampler.hpp"

using namespace conewalk;

namespace {

WalkModel quadrant_srw() {
    Rational q(1, 4);
    IncrementDistribution inc = make_increments(
        2, {{{1, 0}, q}, {{-1, 0}, q}, {{0, 1}, q}, {{0, -1}, q}});
    return make_model(std::move(inc), ConeSpec::orthant(2));
}

WalkModel halfline_srw() {
    Rational h(1, 2);
    IncrementDistribution inc = make_increments(1, {{{1}, h}, {{-1}, h}});
    return make_model(std::move(inc), ConeSpec::orthant(1));
}

}  // namespace

static void BM_dense_advance(benchmark::State& state) {
    WalkModel m = quadrant_srw();
    const int64_t n = state.range(0);
    for (auto _ : state) {
        Evolution ev(m, {1, 1});
        ev.advance_to(n);
        benchmark::DoNotOptimize(ev.total_mass());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_dense_advance)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_sparse_advance(benchmark::State& state) {
    WalkModel m = quadrant_srw();
    WindowPolicy policy;
    policy.force_sparse = true;
    const int64_t n = state.range(0);
    for (auto _ : state) {
        Evolution ev(m, {1, 1}, policy);
        ev.advance_to(n);
        benchmark::DoNotOptimize(ev.total_mass());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_sparse_advance)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_green_halfline(benchmark::State& state) {
    WalkModel m = halfline_srw();
    const int64_t horizon = state.range(0);
    for (auto _ : state) {
        GreenResult g = green(m, {1}, {5}, horizon, true);
        benchmark::DoNotOptimize(g.value());
    }
}
BENCHMARK(BM_green_halfline)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

static void BM_mc_survival(benchmark::State& state) {
    WalkModel m = quadrant_srw();
    const int64_t samples = state.range(0);
    for (auto _ : state) {
        McEstimate est = mc_survival(m, {1, 1}, 256, samples, 7u, 1);
        benchmark::DoNotOptimize(est.mean);
    }
    state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_mc_survival)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
