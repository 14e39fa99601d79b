#include <benchmark/benchmark.h>

#include "wdecon/distributions.hpp"
#include "wdecon/dpm.hpp"

namespace {

void BM_GibbsSweep(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto preset = wdecon::SignalPreset::get("gmix2");
    const auto noise = wdecon::NoiseModel::laplace();
    const auto sample = wdecon::simulate(preset, noise, n, 11);

    wdecon::DPMConfig cfg;
    cfg.noise = noise;
    wdecon::Rng rng(11);
    auto st = wdecon::initial_state(sample.y, cfg, rng);
    wdecon::GibbsScales scales;
    // settle into a typical cluster structure before timing
    for (int i = 0; i < 50; ++i) wdecon::gibbs_sweep(st, sample.y, cfg, scales, true, rng);

    for (auto _ : state) {
        wdecon::gibbs_sweep(st, sample.y, cfg, scales, false, rng);
        // keep the sweep observable without handing the live chain state
        // to DoNotOptimize (its "+r" constraint may write the register back)
        double sigma_now = st.sigma;
        benchmark::DoNotOptimize(sigma_now);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GibbsSweep)->RangeMultiplier(4)->Range(1 << 8, 1 << 12)->Complexity();

}  // namespace
