#include <benchmark/benchmark.h>

#include <cmath>

#include "relent/builtins.hpp"
#include "relent/hypotheses.hpp"
#include "relent/solver.hpp"

using namespace relent;

namespace {

Field sine_field(const Grid1D& g, int n) {
    Field f = Field::make(g, n);
    for (int i = 0; i < g.N; ++i) {
        f.U[i][0] = 1.0 + 0.1 * std::sin(g.center(i));
        if (n == 2) f.U[i][1] = 0.1 * std::cos(g.center(i));
    }
    return f;
}

void BM_semidiscrete_rhs(benchmark::State& state) {
    const SystemSpec sys = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    const Grid1D g = Grid1D::make(static_cast<int>(state.range(0)), 2.0 * M_PI);
    const Field f = sine_field(g, 2);
    for (auto _ : state) {
        auto rhs = semidiscrete_rhs(sys, f, 0.01, Scheme::LocalLaxFriedrichs);
        benchmark::DoNotOptimize(rhs);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_semidiscrete_rhs)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_time_step(benchmark::State& state) {
    const SystemSpec sys = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    const Grid1D g = Grid1D::make(static_cast<int>(state.range(0)), 2.0 * M_PI);
    Field f = sine_field(g, 2);
    SolverConfig cfg;
    cfg.epsilon = 0.01;
    cfg.scheme = Scheme::Central;
    for (auto _ : state) {
        f = time_step(sys, f, 1e-4, cfg);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_time_step)->RangeMultiplier(2)->Range(64, 512);

void BM_audit_pointwise(benchmark::State& state) {
    const SystemSpec sys = make_duct_gas(1.0, 2.0, sin_profile(2.0, 0.3));
    Vec U(2);
    U << 1.2, 0.4;
    for (auto _ : state) {
        auto rec = audit_pointwise(sys, U, 0.3, 0.1);
        benchmark::DoNotOptimize(rec);
    }
}
BENCHMARK(BM_audit_pointwise);

void BM_resolvent_kernel(benchmark::State& state) {
    const double dt = 1e-2;
    const int m = static_cast<int>(state.range(0));
    std::vector<double> k(m);
    for (int i = 0; i < m; ++i) k[i] = std::exp(-i * dt);
    for (auto _ : state) {
        auto table = resolvent_kernel(k, dt);
        benchmark::DoNotOptimize(table);
    }
    state.SetComplexityN(m);
}
BENCHMARK(BM_resolvent_kernel)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

}  // namespace

BENCHMARK_MAIN();
