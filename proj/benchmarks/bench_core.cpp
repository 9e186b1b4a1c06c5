#include <benchmark/benchmark.h>

#include "idyn/integrators.hpp"
#include "idyn/lyapunov.hpp"
#include "idyn/scenario.hpp"

namespace {

using namespace idyn;

void BM_Rk45SmoothRun(benchmark::State& state) {
    const Objective q = make_quartic();
    const PerturbationSignal sig = cosine_decay(3.1, 2);
    const SystemSpec spec{SystemKind::Isehd, 3.1, 1.0, 0.0, 1.0};
    IntegratorConfig cfg;
    for (auto _ : state) {
        Trajectory traj = integrate_system(spec, q, sig, 50.0, {-10.0, 20.0}, {5.0, -5.0}, cfg);
        benchmark::DoNotOptimize(traj.x.back());
    }
}
BENCHMARK(BM_Rk45SmoothRun);

void BM_ProxStepQuarticL1(benchmark::State& state) {
    const Objective l1 = make_quartic_l1(0.1);
    Vec v{-7.3, 12.9};
    for (auto _ : state) {
        Vec p = prox(l1, v, 1e-3);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_ProxStepQuarticL1);

void BM_InclusionRun(benchmark::State& state) {
    const Objective l1 = make_quartic_l1(0.1);
    const PerturbationSignal sig = cosine_decay(3.1, 2);
    const SystemSpec spec{SystemKind::IsehdInclusion, 3.1, 1.0, 0.0, 1.0};
    auto [x0, y0] = lift_initial(spec, l1, sig, {-10.0, 20.0}, {5.0, -5.0});
    for (auto _ : state) {
        Trajectory traj = integrate_prox_explicit(spec, l1, sig, 1.0, 50.0, x0, y0, 1e-3);
        benchmark::DoNotOptimize(traj.x.back());
    }
}
BENCHMARK(BM_InclusionRun);

void BM_EnergyFast(benchmark::State& state) {
    const Objective q = make_quartic();
    const PerturbationSignal sig = cosine_decay(3.1, 2);
    const SystemSpec spec{SystemKind::Isehd, 3.1, 1.0, 0.0, 1.0};
    IntegratorConfig cfg;
    std::vector<double> grid(2000);
    for (int i = 0; i < 2000; ++i) grid[i] = 1.0 + 49.0 * i / 1999.0;
    cfg.output_times = grid;
    const Trajectory traj =
        integrate_system(spec, q, sig, 50.0, {-10.0, 20.0}, {5.0, -5.0}, cfg);
    for (auto _ : state) {
        EnergyTrace e = energy_fast(traj, q, sig, 3.1, 1.0, {1.0, 5.0});
        benchmark::DoNotOptimize(e.values.back());
    }
}
BENCHMARK(BM_EnergyFast);

}  // namespace

BENCHMARK_MAIN();
