#include <benchmark/benchmark.h>

#include <cmath>

#include "nlch/config.hpp"
#include "nlch/dynamics.hpp"
#include "nlch/kernel.hpp"
#include "nlch/spectral.hpp"

namespace {

using namespace nlch;

ScalarField test_field(const TorusGrid& g) {
    InitialRecipe r;
    r.kind = InitialRecipe::Kind::seeded_random;
    r.mean = 0.2;
    r.amplitude = 0.1;
    return build_initial(r, g, 7);
}

void BM_transform_roundtrip(benchmark::State& state) {
    const TorusGrid g = TorusGrid::make(2, static_cast<int>(state.range(0)), 2 * M_PI);
    const ScalarField f = test_field(g);
    for (auto _ : state) {
        std::vector<cdouble> spec = forward_fft(g, f.values());
        std::vector<double> back = inverse_fft(g, spec);
        benchmark::DoNotOptimize(back.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_transform_roundtrip)->Arg(64)->Arg(128)->Arg(256);

void BM_build_symbol(benchmark::State& state) {
    const TorusGrid g = TorusGrid::make(2, static_cast<int>(state.range(0)), 2 * M_PI);
    const MollifierKernel k = build_kernel(MollifierFamily::smooth_bump, 0.2, g);
    for (auto _ : state) {
        NonlocalSymbol sym = build_symbol(k, g);
        benchmark::DoNotOptimize(sym.b.data());
    }
}
BENCHMARK(BM_build_symbol)->Arg(64)->Arg(128)->Arg(256);

void BM_apply_operator(benchmark::State& state) {
    const TorusGrid g = TorusGrid::make(2, static_cast<int>(state.range(0)), 2 * M_PI);
    const NonlocalSymbol sym = build_symbol(build_kernel(MollifierFamily::smooth_bump, 0.2, g), g);
    const ScalarField f = test_field(g);
    for (auto _ : state) {
        ScalarField out = apply_B(sym, f);
        benchmark::DoNotOptimize(out.values().data());
    }
}
BENCHMARK(BM_apply_operator)->Arg(64)->Arg(128)->Arg(256);

void BM_step(benchmark::State& state) {
    const TorusGrid g = TorusGrid::make(2, static_cast<int>(state.range(0)), 2 * M_PI);
    const NonlocalSymbol sym = build_symbol(build_kernel(MollifierFamily::smooth_bump, 0.2, g), g);
    const PotentialSplit split = make_potential(PotentialKind::cubic);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.lambda = 1e-2;
    const VelocityField vel = velocity_shear(g, 0.5, 1, 0.0);
    Stepper st(g, sym.b, split, cfg, &vel);
    SimState s{test_field(g), 0.0, 0};
    for (auto _ : state) {
        st.advance(s);
        benchmark::DoNotOptimize(s.u.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_step)->Arg(64)->Arg(128);

void BM_yosida(benchmark::State& state) {
    const PotentialSplit split = make_potential(
        state.range(0) == 0 ? PotentialKind::cubic
                            : state.range(0) == 1 ? PotentialKind::logarithmic
                                                  : PotentialKind::obstacle);
    double s = -1.3;
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 0; i < 1024; ++i) acc += split.yosida(1e-2, s + i * 0.0025);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_yosida)->Arg(0)->Arg(1)->Arg(2);

} // namespace

BENCHMARK_MAIN();
