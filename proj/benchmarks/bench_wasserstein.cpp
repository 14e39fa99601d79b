#include <benchmark/benchmark.h>

#include <numeric>

#include "wdecon/rng.hpp"
#include "wdecon/wasserstein.hpp"

namespace {

void BM_W1Empirical(benchmark::State& state) {
    wdecon::Rng rng(7);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal() + 0.3;
    }
    auto mu = wdecon::ProbabilityMeasure::empirical(a);
    auto nu = wdecon::ProbabilityMeasure::empirical(b);
    for (auto _ : state) benchmark::DoNotOptimize(wdecon::w1(mu, nu));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_W1Empirical)->RangeMultiplier(4)->Range(1 << 8, 1 << 16)->Complexity();

void BM_W1GaussMixVsGrid(benchmark::State& state) {
    wdecon::Rng rng(7);
    const auto atoms = static_cast<std::size_t>(state.range(0));
    std::vector<double> locs(atoms), w(atoms, 1.0 / static_cast<double>(atoms));
    for (auto& u : locs) u = rng.uniform(-3.0, 3.0);
    w.back() += 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
    auto mix = wdecon::ProbabilityMeasure::gauss_mix(locs, w, 0.5);

    const std::size_t n = 1 << 12;
    std::vector<double> vals(n);
    const double lo = -10.0, hi = 10.0, dx = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = lo + dx * static_cast<double>(k);
        vals[k] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    }
    auto grid = wdecon::ProbabilityMeasure::grid_density(wdecon::GridFunction(lo, hi, vals));
    for (auto _ : state) benchmark::DoNotOptimize(wdecon::w1(mix, grid));
}
BENCHMARK(BM_W1GaussMixVsGrid)->Arg(4)->Arg(16)->Arg(64);

}  // namespace
