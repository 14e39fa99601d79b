#include <benchmark/benchmark.h>

#include <cmath>

#include "wdecon/kernels.hpp"
#include "wdecon/numerics.hpp"

namespace {

wdecon::GridFunction gaussian_grid(std::size_t n) {
    const double lo = -40.0, hi = 40.0;
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = lo + dx * static_cast<double>(k);
        vals[k] = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    }
    return wdecon::GridFunction(lo, hi, std::move(vals));
}

void BM_FourierRoundTrip(benchmark::State& state) {
    auto f = gaussian_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto g = wdecon::fourier_inverse(wdecon::fourier_forward(f));
        benchmark::DoNotOptimize(g);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FourierRoundTrip)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

void BM_Convolve(benchmark::State& state) {
    auto f = gaussian_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto g = wdecon::convolve(f, f);
        benchmark::DoNotOptimize(g);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_BuildBundle(benchmark::State& state) {
    const wdecon::GridSpec spec{-40.0, 40.0, static_cast<std::size_t>(state.range(0))};
    const auto noise = wdecon::NoiseModel::laplace();
    for (auto _ : state) {
        auto b = wdecon::build_bundle(noise, 1.0 / 64.0, spec);
        benchmark::DoNotOptimize(b);
    }
}
BENCHMARK(BM_BuildBundle)->Arg(1 << 14)->Arg(1 << 16);

}  // namespace
