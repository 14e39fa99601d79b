#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wdecon/distributions.hpp"
#include "wdecon/inversion.hpp"
#include "wdecon/rng.hpp"
#include "wdecon/wasserstein.hpp"

using namespace wdecon;

namespace {

GridFunction normal_grid(double mu, double sigma, double lo = -40.0, double hi = 40.0,
                         std::size_t n = 1 << 14) {
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double z = (lo + dx * static_cast<double>(k) - mu) / sigma;
        vals[k] = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    }
    return GridFunction(lo, hi, std::move(vals));
}

std::vector<ProbabilityMeasure> metric_test_set() {
    std::vector<ProbabilityMeasure> out;
    out.push_back(ProbabilityMeasure::dirac(0.0));
    out.push_back(ProbabilityMeasure::discrete({-1.0, 1.0}, {0.25, 0.75}));
    out.push_back(ProbabilityMeasure::empirical({-0.5, 0.1, 0.4, 2.0}));
    out.push_back(ProbabilityMeasure::gauss_mix({0.0}, {1.0}, 1.0));
    out.push_back(ProbabilityMeasure::gauss_mix({-1.0, 1.0}, {0.5, 0.5}, 0.5));
    out.push_back(ProbabilityMeasure::grid_density(normal_grid(0.3, 0.8)));
    return out;
}

}  // namespace

TEST_CASE("cdf: per-representation anchors") {
    CHECK(ProbabilityMeasure::empirical({1.0, 3.0}).cdf(2.0) == doctest::Approx(0.5));
    CHECK(ProbabilityMeasure::gauss_mix({0.0}, {1.0}, 1.0).cdf(0.0) == doctest::Approx(0.5));
    CHECK(ProbabilityMeasure::discrete({-1.0, 1.0}, {0.25, 0.75}).cdf(0.0) ==
          doctest::Approx(0.25));
    // weights must sum to one
    CHECK_THROWS(ProbabilityMeasure::discrete({0.0, 1.0}, {0.5, 0.6}));
    CHECK_THROWS(ProbabilityMeasure::gauss_mix({0.0}, {1.0}, 0.0));
}

TEST_CASE("w1: dirac and shift anchors") {
    CHECK(w1(ProbabilityMeasure::dirac(0.0), ProbabilityMeasure::dirac(1.0)) ==
          doctest::Approx(1.0));
    // location shift of a smooth law
    auto a = ProbabilityMeasure::grid_density(normal_grid(0.0, 1.0));
    auto b = ProbabilityMeasure::grid_density(normal_grid(0.5, 1.0));
    CHECK(w1(a, b) == doctest::Approx(0.5).epsilon(2e-5));
    // hand-integrated step case: empirical {1,3} vs dirac at 2
    CHECK(w1(ProbabilityMeasure::empirical({1.0, 3.0}), ProbabilityMeasure::dirac(2.0)) ==
          doctest::Approx(1.0));
}

TEST_CASE("w1: equal-size empirical pairs use the order-statistics formula") {
    Rng rng(5);
    std::vector<double> a(1000), b(1000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal() + 0.25;
    }
    auto mu = ProbabilityMeasure::empirical(a);
    auto nu = ProbabilityMeasure::empirical(b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ref += std::abs(a[i] - b[i]);
    ref /= static_cast<double>(a.size());
    CHECK(w1(mu, nu) == doctest::Approx(ref));
}

TEST_CASE("w1: metric axioms on the fixed test set") {
    auto ms = metric_test_set();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        CHECK(w1(ms[i], ms[i]) < 1e-10);
        for (std::size_t j = 0; j < i; ++j) {
            const double dij = w1(ms[i], ms[j]);
            const double dji = w1(ms[j], ms[i]);
            CHECK(std::abs(dij - dji) < 1e-10);
            for (std::size_t k = 0; k < ms.size(); ++k) {
                if (k == i || k == j) continue;
                CHECK(dij <= w1(ms[i], ms[k]) + w1(ms[k], ms[j]) + 1e-8);
            }
        }
    }
}

TEST_CASE("w1: translation equivariance") {
    auto ms = metric_test_set();
    const double c = 0.8;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            CHECK(std::abs(w1(ms[i].translated(c), ms[j].translated(c)) - w1(ms[i], ms[j])) <
                  1e-8);
        }
        CHECK(w1(ms[i].translated(c), ms[i]) == doctest::Approx(c).epsilon(1e-6));
    }
}

TEST_CASE("w1: convolution with common noise contracts the distance") {
    const auto noise = NoiseModel::laplace();
    const GridSpec spec{-40.0, 40.0, 1 << 14};
    auto ms = metric_test_set();
    for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            auto mi = ProbabilityMeasure::grid_density(mixed_density(ms[i], noise, spec));
            auto mj = ProbabilityMeasure::grid_density(mixed_density(ms[j], noise, spec));
            CHECK(w1(mi, mj) <= w1(ms[i], ms[j]) + 1e-6);
        }
    }
}

TEST_CASE("w1: representation agreement for a gaussian mixture") {
    auto mix = ProbabilityMeasure::gauss_mix({-1.0, 1.0}, {0.5, 0.5}, 0.5);
    GridFunction d(-40.0, 40.0, [&] {
        const std::size_t n = 1 << 14;
        std::vector<double> vals(n);
        const double dx = 80.0 / static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = -40.0 + dx * static_cast<double>(k);
            const double za = (x + 1.0) / 0.5, zb = (x - 1.0) / 0.5;
            vals[k] = 0.5 * (std::exp(-0.5 * za * za) + std::exp(-0.5 * zb * zb)) /
                      (0.5 * std::sqrt(2.0 * std::numbers::pi));
        }
        return vals;
    }());
    auto grid = ProbabilityMeasure::grid_density(std::move(d));
    auto probe = ProbabilityMeasure::gauss_mix({0.2}, {1.0}, 0.7);
    CHECK(w1(mix, probe) == doctest::Approx(w1(grid, probe)).epsilon(1e-4));
    CHECK(w1(mix, grid) < 1e-4);
}

TEST_CASE("dkw threshold closed form") {
    CHECK(dkw_threshold(100, 0.05) ==
          doctest::Approx(std::sqrt(std::log(40.0) / 200.0)).epsilon(1e-12));
    CHECK(dkw_threshold(100, 0.05) == doctest::Approx(0.13582).epsilon(1e-4));
    CHECK(dkw_threshold(400, 0.05) == doctest::Approx(0.06791).epsilon(1e-4));
    CHECK_THROWS(dkw_threshold(100, 2.0));
    CHECK_THROWS(dkw_threshold(100, 0.0));
    CHECK_THROWS(dkw_threshold(0, 0.5));
}

namespace {

//! Smoothed uniform on [-1/2, 1/2]: support length ~1, where the W1 tail
//! bound 2 exp(-2 n t^2) is honest (W1 <= sup-distance x support length).
ProbabilityMeasure short_uniform() {
    const std::size_t n = 1 << 12;
    const double lo = -0.7, hi = 0.7, tau = 0.02;
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = lo + dx * static_cast<double>(k);
        vals[k] = 0.5 * (std::erf((x + 0.5) / (tau * std::numbers::sqrt2)) -
                         std::erf((x - 0.5) / (tau * std::numbers::sqrt2)));
    }
    double mass = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        mass += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * vals[k] * dx;
    for (auto& v : vals) v /= mass;
    return ProbabilityMeasure::grid_density(GridFunction(lo, hi, std::move(vals)));
}

double quantile_of(const ProbabilityMeasure& mu, double p, double lo, double hi) {
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mu.cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("dkw test: size under the null and power under a shift") {
    const auto mu0 = short_uniform();
    Rng rng(70);
    const std::size_t n = 1000;
    const int reps = 200;
    int rejects_null = 0, rejects_shift = 0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> null_sample(n), shifted(n);
        for (std::size_t i = 0; i < n; ++i) {
            null_sample[i] = quantile_of(mu0, rng.uniform(), -0.7, 0.7);
            shifted[i] = null_sample[i] + 1.0;
        }
        if (dkw_test(null_sample, mu0, 0.05).reject) ++rejects_null;
        if (dkw_test(shifted, mu0, 0.05).reject) ++rejects_shift;
    }
    CHECK(static_cast<double>(rejects_null) / reps <= 0.08);
    CHECK(static_cast<double>(rejects_shift) / reps >= 0.99);
    CHECK_THROWS(dkw_test({}, mu0, 0.05));
    CHECK_THROWS(dkw_test({1.0}, ProbabilityMeasure::dirac(0.0), 0.05));  // step mu0
}

TEST_CASE("dkw test: exact quantiles stay under the threshold") {
    const auto mu0 = ProbabilityMeasure::gauss_mix({0.0}, {1.0}, 1.0);
    for (std::size_t n : {50u, 200u, 1000u}) {
        std::vector<double> sample(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            // normal quantile via bisection on the closed-form CDF
            double lo = -10.0, hi = 10.0;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (mu0.cdf(mid) < p ? lo : hi) = mid;
            }
            sample[i] = 0.5 * (lo + hi);
        }
        const auto res = dkw_test(sample, mu0, 0.05);
        CHECK(res.statistic < res.threshold);
        CHECK_FALSE(res.reject);
    }
}
