#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wdecon/inversion.hpp"
#include "wdecon/study.hpp"

using namespace wdecon;

namespace {

const GridSpec kSpec{-40.0, 40.0, 1 << 14};

ProbabilityMeasure gmix_grid(double shift = 0.0) {
    SignalPreset p = SignalPreset::get("gmix2", kSpec.lo, kSpec.hi, kSpec.n);
    auto m = ProbabilityMeasure::grid_density(p.density);
    return shift == 0.0 ? m : m.translated(shift);
}

std::vector<double> dyadic(int from, int to) {
    std::vector<double> hs;
    for (int k = from; k <= to; ++k) hs.push_back(std::pow(2.0, -k));
    return hs;
}

}  // namespace

TEST_CASE("identical measures: every component vanishes") {
    const auto noise = NoiseModel::laplace();
    InversionReport r =
        inversion_components(gmix_grid(), gmix_grid(), noise, 1.0 / 64.0, std::nullopt, kSpec);
    CHECK(r.w1_actual < 1e-8);
    CHECK(r.t1 < 1e-8);
    CHECK(r.t2_w1 < 1e-8);
    CHECK(r.t2_tv < 1e-8);
    CHECK(r.bias_term == doctest::Approx(1.0 / 64.0));
}

TEST_CASE("shift passes through the convolution") {
    const auto noise = NoiseModel::laplace();
    auto muX = gmix_grid(0.2);
    auto mu0 = gmix_grid();
    InversionReport r = inversion_components(muX, mu0, noise, 1.0 / 64.0, std::nullopt, kSpec);
    CHECK(r.w1_actual == doctest::Approx(0.2).epsilon(1e-4));
    auto muY = ProbabilityMeasure::grid_density(mixed_density(muX, noise, kSpec));
    auto mu0Y = ProbabilityMeasure::grid_density(mixed_density(mu0, noise, kSpec));
    CHECK(w1(muY, mu0Y) == doctest::Approx(0.2).epsilon(1e-4));
}

TEST_CASE("perturbed mixture: bound dominates the actual distance") {
    const auto noise = NoiseModel::laplace();
    auto muX = ProbabilityMeasure::gauss_mix({-1.0, 1.0}, {0.45, 0.55}, 0.5);
    auto mu0 = ProbabilityMeasure::gauss_mix({-1.0, 1.0}, {0.5, 0.5}, 0.5);
    InversionReport r = inversion_components(muX, mu0, noise, 1.0 / 64.0, std::nullopt, kSpec);
    CHECK(r.w1_actual > 0.0);
    CHECK(r.bound_tv >= r.w1_actual);
    CHECK(r.slack >= 1.0);
    CHECK(std::isfinite(r.slack));
}

TEST_CASE("t2 components are exactly linear in the density difference") {
    const auto noise = NoiseModel::laplace();
    auto mu0 = gmix_grid();
    SignalPreset lap = SignalPreset::get("laplace-signal", kSpec.lo, kSpec.hi, kSpec.n);
    const double h = 1.0 / 32.0;

    auto mixture_with = [&](double lambda) {
        std::vector<double> vals(kSpec.n);
        SignalPreset g = SignalPreset::get("gmix2", kSpec.lo, kSpec.hi, kSpec.n);
        for (std::size_t k = 0; k < kSpec.n; ++k)
            vals[k] = (1.0 - lambda) * g.density[k] + lambda * lap.density[k];
        return ProbabilityMeasure::grid_density(GridFunction(kSpec.lo, kSpec.hi, vals));
    };
    InversionReport full = inversion_components(mixture_with(1.0), mu0, noise, h, std::nullopt, kSpec);
    InversionReport half = inversion_components(mixture_with(0.5), mu0, noise, h, std::nullopt, kSpec);
    CHECK(half.t2_tv == doctest::Approx(0.5 * full.t2_tv).epsilon(1e-8));
    CHECK(half.t2_w1 == doctest::Approx(0.5 * full.t2_w1).epsilon(1e-8));
    CHECK(half.t1 == doctest::Approx(0.5 * full.t1).epsilon(1e-8));
}

TEST_CASE("optimize_h: identical pair picks the smallest bias") {
    const auto noise = NoiseModel::laplace();
    auto hs = dyadic(2, 7);
    InversionReport r = optimize_h(gmix_grid(), gmix_grid(), noise, hs, std::nullopt, kSpec);
    CHECK(r.h == doctest::Approx(hs.back()));
    CHECK_THROWS(optimize_h(gmix_grid(), gmix_grid(), noise, {}, std::nullopt, kSpec));
}

TEST_CASE("grid-searched minimizer of the closed-form bound tracks d^{1/(alpha+beta)}") {
    // the objective h^{alpha+1} + h^{-(beta-1)} |log h| d minimized over a
    // quarter-dyadic grid; alpha = 1, beta = 2
    const double alpha = 1.0, beta = 2.0;
    std::vector<double> hs;
    for (double e = 1.0; e <= 10.0 + 1e-9; e += 0.25) hs.push_back(std::pow(2.0, -e));

    std::vector<double> ds = {1e-2, 1e-3, 1e-4}, hstars;
    for (double d : ds) {
        double best_h = hs.front(), best = 1e300;
        for (double h : hs) {
            const double obj = std::pow(h, alpha + 1.0) +
                               std::pow(h, -(beta - 1.0)) * std::abs(std::log(h)) * d;
            if (obj < best) {
                best = obj;
                best_h = h;
            }
        }
        hstars.push_back(best_h);
    }
    const double slope = (std::log(hstars.front()) - std::log(hstars.back())) /
                         (std::log(ds.front()) - std::log(ds.back()));
    CHECK(std::abs(slope - 1.0 / (alpha + beta)) <= 0.2);
}

TEST_CASE("optimize_h saturates at the floor for smooth pairs") {
    // smooth differences have dying spectra, so t2 stops growing once the
    // operator band clears them and the smallest bias wins
    const auto noise = NoiseModel::laplace();
    auto mu0 = gmix_grid();
    SignalPreset g = SignalPreset::get("gmix2", kSpec.lo, kSpec.hi, kSpec.n);
    SignalPreset lap = SignalPreset::get("laplace-signal", kSpec.lo, kSpec.hi, kSpec.n);
    std::vector<double> vals(kSpec.n);
    for (std::size_t k = 0; k < kSpec.n; ++k)
        vals[k] = 0.9 * g.density[k] + 0.1 * lap.density[k];
    auto muX = ProbabilityMeasure::grid_density(GridFunction(kSpec.lo, kSpec.hi, vals));
    auto hs = dyadic(2, 7);
    InversionReport r = optimize_h(muX, mu0, noise, hs, 1.0, kSpec);
    CHECK(r.h == doctest::Approx(hs.back()));
    CHECK(r.bound_tv >= r.w1_actual);
}

TEST_CASE("rate exponents: closed forms") {
    CHECK(rate_exponents(1.0, 2.0).direct_to_w1 == doctest::Approx(2.0 / 3.0));
    CHECK(rate_exponents(std::nullopt, 2.0).direct_to_w1 == doctest::Approx(0.5));
    CHECK(rate_exponents(1.0, 2.0).w1_rate_from_root_n == doctest::Approx(2.0 / 7.0));
    // ultra-smooth mixing: the direct and W1 rates coincide
    CHECK(rate_exponents(1e9, 2.0).direct_to_w1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rate_exponents(std::nullopt, 0.5).direct_to_w1 == doctest::Approx(1.0));
    CHECK_THROWS(rate_exponents(1.0, 0.0));
}

TEST_CASE("t2 branches: W1 branch bounded by a constant times the TV branch") {
    const auto noise = NoiseModel::laplace();
    auto pairs = inversion_suite(kSpec);
    double worst_ratio = 0.0;
    for (const auto& [muX, mu0] : pairs) {
        InversionReport r = inversion_components(muX, mu0, noise, 1.0 / 32.0, std::nullopt, kSpec);
        if (r.t2_tv > 1e-12) worst_ratio = std::max(worst_ratio, r.t2_w1 / r.t2_tv);
    }
    CHECK(worst_ratio > 0.0);
    CHECK(worst_ratio <= 5.0);  // pilot value ~2; headroom for grid effects
}

TEST_CASE("verify_inequality: identical pairs pass at the constant floor") {
    const auto noise = NoiseModel::laplace();
    std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> pairs;
    for (int i = 0; i < 5; ++i) pairs.emplace_back(gmix_grid(), gmix_grid());
    std::vector<std::optional<double>> alphas(pairs.size(), std::nullopt);
    VerifySummary s = verify_inequality(pairs, noise, dyadic(2, 6), alphas, kSpec, 3);
    CHECK(s.pass);
    CHECK(s.fitted_constant == doctest::Approx(1.0));
}

TEST_CASE("verify_inequality: shift family passes with a stable constant") {
    const auto noise = NoiseModel::laplace();
    std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> pairs;
    for (double c : {0.05, 0.1, 0.2, 0.4, 0.8})
        pairs.emplace_back(gmix_grid(c), gmix_grid());
    std::vector<std::optional<double>> alphas(pairs.size(), std::nullopt);
    VerifySummary s = verify_inequality(pairs, noise, dyadic(2, 7), alphas, kSpec, pairs.size());
    CHECK(s.pass);
    CHECK(s.worst_slack >= 1.0);

    // per-pair fitted constants stay within a factor 2 of each other
    double cmin = 1e300, cmax = 0.0;
    for (const auto& r : s.reports) {
        if (r.w1_actual <= 0.0) continue;
        const double c = r.w1_actual / r.bound_tv;
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    CHECK(cmax / cmin <= 2.0);

    std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> too_few(
        pairs.begin(), pairs.begin() + 4);
    CHECK_THROWS(verify_inequality(too_few, noise, dyadic(2, 7),
                                   std::vector<std::optional<double>>(4, std::nullopt), kSpec, 2));
}

TEST_CASE("adversarial wiggle pair passes through the suite") {
    const auto noise = NoiseModel::laplace();
    auto pairs = inversion_suite(kSpec);
    std::vector<std::optional<double>> alphas(pairs.size(), std::nullopt);
    VerifySummary s = verify_inequality(pairs, noise, dyadic(2, 7), alphas, kSpec, 4);
    CHECK(s.pass);
    CHECK(s.worst_slack >= 1.0);
    // the wiggle pair is the last one: the bound holds at its optimal h
    // even with the constant at its floor
    CHECK(s.reports.back().bound_tv >= s.reports.back().w1_actual);
}
