// Microbenchmarks of the quadrature kernels and the solver hot path.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "gelfand/fixedpoint.hpp"
#include "gelfand/grid.hpp"
#include "gelfand/params.hpp"
#include "gelfand/riesz.hpp"

using namespace gelfand;

namespace {

EvenProfile gaussian(const HalfGrid& g) {
    std::vector<double> v(static_cast<std::size_t>(g.n) + 1);
    for (int i = 0; i <= g.n; ++i)
        v[static_cast<std::size_t>(i)] = std::exp(-g.x(i) * g.x(i));
    return {g, v};
}

void bm_moment_tables(benchmark::State& state) {
    const HalfGrid g = make_grid(40.0, static_cast<int>(state.range(0)));
    const FractionalOrder ord = make_order(0.75);
    for (auto _ : state) {
        KernelMoments m(g, ord);
        benchmark::DoNotOptimize(m.scale_h());
    }
}
BENCHMARK(bm_moment_tables)->Arg(512)->Arg(2048);

void bm_conj_riesz(benchmark::State& state) {
    const HalfGrid g = make_grid(40.0, static_cast<int>(state.range(0)));
    const KernelMoments m(g, make_order(0.75));
    const EvenProfile p = gaussian(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conj_riesz(m, p));
    }
}
BENCHMARK(bm_conj_riesz)->Arg(512)->Arg(2048);

void bm_exponent_integral(benchmark::State& state) {
    const HalfGrid g = make_grid(40.0, static_cast<int>(state.range(0)));
    const KernelMoments m(g, make_order(0.75));
    const EvenProfile p = gaussian(g);
    std::vector<double> rho(p.samples.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = p.samples[i] * p.samples[i];
    const std::vector<double> bub = second_diffs(rho);
    const EvenProfile rp{g, rho};
    for (auto _ : state) {
        benchmark::DoNotOptimize(exponent_integral(m, rp, &bub));
    }
}
BENCHMARK(bm_exponent_integral)->Arg(512)->Arg(2048);

void bm_weight_matrix(benchmark::State& state) {
    const HalfGrid g = make_grid(40.0, static_cast<int>(state.range(0)));
    const KernelMoments m(g, make_order(0.75));
    for (auto _ : state) {
        benchmark::DoNotOptimize(weight_matrix(m, true));
    }
}
BENCHMARK(bm_weight_matrix)->Arg(512)->Arg(1024);

void bm_solve(benchmark::State& state) {
    ShootingParams p;
    p.lambda = 1.0;
    p.sigma = 0.0;
    p.weight = Weight::constant(1.0);
    p.order = make_order(0.75);
    const HalfGrid g = make_grid(40.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(picard_solve(p, g, {}));
    }
}
BENCHMARK(bm_solve)->Arg(512)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
