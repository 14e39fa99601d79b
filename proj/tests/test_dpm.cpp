#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wdecon/dpm.hpp"

using namespace wdecon;

namespace {

constexpr double kPi = std::numbers::pi;

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

//! Batch-means standard error for a correlated chain.
double batch_se(const std::vector<double>& v, std::size_t batches = 20) {
    const std::size_t b = v.size() / batches;
    std::vector<double> bm;
    for (std::size_t k = 0; k + 1 <= batches; ++k) {
        double acc = 0.0;
        for (std::size_t i = k * b; i < (k + 1) * b; ++i) acc += v[i];
        bm.push_back(acc / static_cast<double>(b));
    }
    const double m = mean(bm);
    double s2 = 0.0;
    for (double x : bm) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(bm.size() - 1);
    return std::sqrt(s2 / static_cast<double>(bm.size()));
}

//! Laplace(1) * N(0, sigma^2) density in closed form.
double laplace_normal_density(double d, double sigma) {
    auto phi_cdf = [](double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); };
    const double a = std::exp(0.5 * sigma * sigma);
    return 0.5 * a *
           (std::exp(-d) * phi_cdf(d / sigma - sigma) +
            std::exp(d) * phi_cdf(-d / sigma - sigma));
}

std::vector<double> gmix_data(std::size_t n, std::uint64_t seed) {
    SignalPreset preset = SignalPreset::get("gmix2");
    return simulate(preset, NoiseModel::laplace(), n, seed).y;
}

}  // namespace

TEST_CASE("augmentation: marginal of W is the Exp(1/2) prior") {
    Rng rng(21);
    const std::size_t n = 100000;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rng.laplace();
        const double w = augment_laplace(r, rng);
        REQUIRE(w > 0.0);
        acc += w;
    }
    CHECK(std::abs(acc / static_cast<double>(n) - 2.0) < 0.05);
}

TEST_CASE("augmentation: conditional mean of 1/W at r = 1") {
    Rng rng(22);
    const std::size_t n = 100000;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += 1.0 / augment_laplace(1.0, rng);
    CHECK(std::abs(acc / static_cast<double>(n) - 1.0) < 0.02);
}

TEST_CASE("augmentation: collapsing W reproduces the Laplace-normal likelihood") {
    Rng rng(23);
    const std::size_t n = 400000;
    std::vector<double> ws(n);
    for (auto& w : ws) w = rng.exponential(0.5);

    Rng pts(24);
    for (int p = 0; p < 20; ++p) {
        const double d = pts.uniform(-4.0, 4.0);
        const double sigma = pts.uniform(0.2, 1.5);
        double acc = 0.0;
        for (double w : ws) {
            const double var = sigma * sigma + w;
            acc += std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
        }
        acc /= static_cast<double>(n);
        const double ref = laplace_normal_density(d, sigma);
        CHECK(std::abs(acc - ref) / ref < 0.01);
    }
}

TEST_CASE("chains are bit-identical for a fixed seed") {
    auto y = gmix_data(120, 5);
    DPMConfig cfg;
    cfg.iters = 300;
    cfg.burn = 100;
    cfg.thin = 2;
    cfg.seed = 77;
    PosteriorDraws a = run_chain(y, cfg);
    PosteriorDraws b = run_chain(y, cfg);
    REQUIRE(a.draws.size() == b.draws.size());
    CHECK(a.draws.size() == (cfg.iters - cfg.burn) / cfg.thin);
    for (std::size_t k = 0; k < a.draws.size(); ++k) {
        CHECK(a.draws[k].sigma == b.draws[k].sigma);
        REQUIRE(a.draws[k].atoms.size() == b.draws[k].atoms.size());
        for (std::size_t i = 0; i < a.draws[k].atoms.size(); ++i) {
            CHECK(a.draws[k].atoms[i] == b.draws[k].atoms[i]);
            CHECK(a.draws[k].weights[i] == b.draws[k].weights[i]);
        }
        CHECK(a.draws[k].sigma > 0.0);
    }
}

TEST_CASE("single observation keeps a single cluster") {
    std::vector<double> y = {0.4};
    DPMConfig cfg;
    cfg.iters = 60;
    cfg.burn = 10;
    cfg.thin = 1;
    Rng rng(cfg.seed);
    DPMState st = initial_state(y, cfg, rng);
    GibbsScales scales;
    for (int s = 0; s < 60; ++s) {
        gibbs_sweep(st, y, cfg, scales, s < 10, rng);
        CHECK(st.clusters.size() == 1);
        CHECK(st.clusters[0].count == 1);
    }
}

TEST_CASE("config validation") {
    std::vector<double> y = {0.0, 1.0};
    DPMConfig cfg;
    cfg.noise = NoiseModel::gamma(1.0);
    CHECK_THROWS(run_chain(y, cfg));
    cfg.noise = NoiseModel::linnik(0.9);
    CHECK_THROWS(run_chain(y, cfg));
    cfg = DPMConfig{};
    cfg.iters = 10;
    cfg.burn = 20;
    CHECK_THROWS(run_chain(y, cfg));
    cfg = DPMConfig{};
    CHECK_THROWS(run_chain({}, cfg));
}

TEST_CASE("invariance smoke test: continuing a chain keeps the sigma level") {
    auto y = gmix_data(200, 9);
    DPMConfig cfg;
    cfg.seed = 31;
    Rng rng(cfg.seed);
    DPMState st = initial_state(y, cfg, rng);
    GibbsScales scales;
    for (int s = 0; s < 500; ++s) gibbs_sweep(st, y, cfg, scales, s < 300, rng);

    // pilot segment, adaptation frozen
    std::vector<double> pilot;
    for (int s = 0; s < 1000; ++s) {
        gibbs_sweep(st, y, cfg, scales, false, rng);
        pilot.push_back(st.sigma);
    }
    // continuation initialized at a pilot posterior draw (the current state)
    std::vector<double> cont;
    for (int s = 0; s < 1000; ++s) {
        gibbs_sweep(st, y, cfg, scales, false, rng);
        cont.push_back(st.sigma);
    }
    const double se = std::sqrt(std::pow(batch_se(pilot), 2) + std::pow(batch_se(cont), 2));
    CHECK(std::abs(mean(pilot) - mean(cont)) <= 3.0 * se);
}

TEST_CASE("linnik chain: runs, stays positive, augmentation variables live") {
    SignalPreset preset = SignalPreset::get("gmix2");
    auto sample = simulate(preset, NoiseModel::linnik(1.5), 150, 13);
    DPMConfig cfg;
    cfg.noise = NoiseModel::linnik(1.5);
    cfg.iters = 200;
    cfg.burn = 100;
    cfg.thin = 2;
    cfg.seed = 14;
    PosteriorDraws draws = run_chain(sample.y, cfg);
    CHECK(draws.draws.size() == 50);
    for (const auto& s : draws.draws) {
        CHECK(s.sigma > 0.0);
        double wsum = 0.0;
        for (double w : s.weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sigma support: many sweeps never leave (0, inf)") {
    auto y = gmix_data(20, 17);
    DPMConfig cfg;
    cfg.seed = 18;
    Rng rng(cfg.seed);
    DPMState st = initial_state(y, cfg, rng);
    GibbsScales scales;
    for (int s = 0; s < 100000; ++s) {
        gibbs_sweep(st, y, cfg, scales, s < 500, rng);
        // check_sigma inside the sweep throws if sigma degenerates
    }
    CHECK(st.sigma > 0.0);
    CHECK(std::isfinite(st.sigma));
}

TEST_CASE("posterior functionals: self distance and label invariance") {
    auto y = gmix_data(150, 19);
    DPMConfig cfg;
    cfg.iters = 200;
    cfg.burn = 100;
    cfg.thin = 10;
    cfg.seed = 20;
    PosteriorDraws draws = run_chain(y, cfg);
    REQUIRE(!draws.draws.empty());

    const Snapshot& snap = draws.draws.front();
    auto self = ProbabilityMeasure::gauss_mix(snap.atoms, snap.weights, snap.sigma);
    PosteriorDraws one;
    one.draws.push_back(snap);
    CHECK(posterior_w1(one, self).front() < 1e-8);

    // relabeling clusters leaves the functional unchanged
    Snapshot rev = snap;
    std::reverse(rev.atoms.begin(), rev.atoms.end());
    std::reverse(rev.weights.begin(), rev.weights.end());
    PosteriorDraws two;
    two.draws.push_back(rev);
    SignalPreset preset = SignalPreset::get("gmix2");
    auto mu0 = ProbabilityMeasure::grid_density(preset.density);
    CHECK(std::abs(posterior_w1(one, mu0).front() - posterior_w1(two, mu0).front()) < 1e-12);

    auto w1s = posterior_w1(draws, mu0);
    for (double v : w1s) CHECK(v >= 0.0);
}

TEST_CASE("posterior predictive L1: zero for the generating snapshot, in [0,2]") {
    const GridSpec spec{-40.0, 40.0, 1 << 13};
    const auto noise = NoiseModel::laplace();
    Snapshot snap;
    snap.atoms = {-1.0, 0.5};
    snap.weights = {0.4, 0.6};
    snap.sigma = 0.7;

    // f0Y generated by the snapshot itself
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);
    std::vector<std::complex<double>> fy(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const double t = freqs[j];
        std::complex<double> mix = 0.0;
        for (std::size_t c = 0; c < snap.atoms.size(); ++c)
            mix += snap.weights[c] *
                   std::complex<double>(std::cos(t * snap.atoms[c]), std::sin(t * snap.atoms[c]));
        fy[j] = noise.cf(t) * mix * std::exp(-0.5 * snap.sigma * snap.sigma * t * t);
    }
    GridFunction f0y = fourier_inverse(Spectrum(spec.lo, spec.hi, freqs, std::move(fy)));

    PosteriorDraws one;
    one.draws.push_back(snap);
    CHECK(posterior_predictive_l1(one, noise, f0y).front() < 1e-4);

    auto y = gmix_data(150, 23);
    DPMConfig cfg;
    cfg.iters = 150;
    cfg.burn = 50;
    cfg.thin = 5;
    cfg.seed = 24;
    PosteriorDraws draws = run_chain(y, cfg);
    for (double v : posterior_predictive_l1(draws, noise, f0y)) {
        CHECK(v >= 0.0);
        CHECK(v <= 2.0);
    }
}

TEST_CASE("exchangeability: permuted data gives the same posterior law") {
    // heavy thinning keeps the 500 draws near-independent; the 0.05 bound
    // sits below the iid two-sample KS null mean (~0.055 at 500 draws), so
    // this is a frozen-realization regression, not a repeatable size test
    auto y = gmix_data(200, 25);
    DPMConfig cfg;
    cfg.iters = 21000;
    cfg.burn = 1000;
    cfg.thin = 40;
    cfg.seed = 202;
    SignalPreset preset = SignalPreset::get("gmix2");
    auto mu0 = ProbabilityMeasure::grid_density(preset.density);

    PosteriorDraws a = run_chain(y, cfg);
    std::vector<double> yr(y.rbegin(), y.rend());
    PosteriorDraws b = run_chain(yr, cfg);
    auto wa = posterior_w1(a, mu0);
    auto wb = posterior_w1(b, mu0);
    REQUIRE(wa.size() == 500);
    REQUIRE(wb.size() == 500);
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < wa.size(); ++i) {
        const double q = static_cast<double>(i + 1) / static_cast<double>(wa.size());
        // empirical CDF of one sample evaluated on the other's order stats
        const auto pos = std::upper_bound(wb.begin(), wb.end(), wa[i]) - wb.begin();
        ks = std::max(ks, std::abs(q - static_cast<double>(pos) / static_cast<double>(wb.size())));
    }
    CHECK(ks < 0.05);
}

TEST_CASE("posterior beats the prior predictive on simulated data") {
    auto y = gmix_data(2000, 27);
    DPMConfig cfg;
    cfg.iters = 1200;
    cfg.burn = 600;
    cfg.thin = 3;
    cfg.seed = 28;
    SignalPreset preset = SignalPreset::get("gmix2");
    auto mu0 = ProbabilityMeasure::grid_density(preset.density);

    PosteriorDraws post = run_chain(y, cfg);
    auto wpost = posterior_w1(post, mu0);
    std::nth_element(wpost.begin(), wpost.begin() + static_cast<std::ptrdiff_t>(wpost.size() / 2),
                     wpost.end());
    const double post_median = wpost[wpost.size() / 2];

    Rng prior_rng(29);
    std::vector<double> wprior;
    for (int i = 0; i < 100; ++i) {
        Snapshot s = sample_prior(cfg, prior_rng);
        wprior.push_back(w1(ProbabilityMeasure::gauss_mix(s.atoms, s.weights, s.sigma), mu0));
    }
    std::nth_element(wprior.begin(),
                     wprior.begin() + static_cast<std::ptrdiff_t>(wprior.size() / 2),
                     wprior.end());
    CHECK(post_median < wprior[wprior.size() / 2]);

    // occupied-cluster envelope on gmix2 data
    double ncl = 0.0;
    for (const auto& s : post.draws) ncl += static_cast<double>(s.atoms.size());
    ncl /= static_cast<double>(post.draws.size());
    CHECK(ncl >= 2.0);
    CHECK(ncl <= 15.0);
}

TEST_CASE("snapshot JSONL serialization") {
    PosteriorDraws d;
    d.draws.push_back(Snapshot{{-1.0, 1.0}, {0.25, 0.75}, 0.5});
    std::ostringstream os;
    write_snapshots_jsonl(d, os);
    CHECK(os.str() ==
          "{\"sigma\":0.5,\"atoms\":[-1,1],\"weights\":[0.25,0.75]}\n");
}
