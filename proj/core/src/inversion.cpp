#include "wdecon/inversion.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wdecon {

namespace {

//! Characteristic function of a measure at frequency t.
std::complex<double> measure_cf(const ProbabilityMeasure& mu, double t) {
    using PM = ProbabilityMeasure;
    return std::visit(
        [&](const auto& r) -> std::complex<double> {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, PM::Empirical>) {
                std::complex<double> acc = 0.0;
                for (double x : r.sample) acc += std::complex<double>(std::cos(t * x), std::sin(t * x));
                return acc / static_cast<double>(r.sample.size());
            } else if constexpr (std::is_same_v<T, PM::Discrete>) {
                std::complex<double> acc = 0.0;
                for (std::size_t i = 0; i < r.atoms.size(); ++i)
                    acc += r.weights[i] *
                           std::complex<double>(std::cos(t * r.atoms[i]), std::sin(t * r.atoms[i]));
                return acc;
            } else if constexpr (std::is_same_v<T, PM::GaussMix>) {
                std::complex<double> acc = 0.0;
                for (std::size_t i = 0; i < r.atoms.size(); ++i)
                    acc += r.weights[i] *
                           std::complex<double>(std::cos(t * r.atoms[i]), std::sin(t * r.atoms[i]));
                return acc * std::exp(-0.5 * r.sigma * r.sigma * t * t);
            } else {
                return 0.0;  // grid densities handled by FFT, not here
            }
        },
        mu.repr());
}

bool has_grid_density(const ProbabilityMeasure& mu) {
    return std::holds_alternative<ProbabilityMeasure::GridDensity>(mu.repr());
}

//! CF samples of mu on the window's frequency grid.
std::vector<std::complex<double>> cf_on_grid(const ProbabilityMeasure& mu, const GridSpec& spec,
                                             const std::vector<double>& freqs) {
    std::vector<std::complex<double>> out(freqs.size());
    if (has_grid_density(mu)) {
        const auto& gd = std::get<ProbabilityMeasure::GridDensity>(mu.repr());
        Spectrum s = fourier_forward(resample(*gd.density, spec));
        for (std::size_t j = 0; j < freqs.size(); ++j) out[j] = s[j];
        return out;
    }
    for (std::size_t j = 0; j < freqs.size(); ++j) out[j] = measure_cf(mu, freqs[j]);
    return out;
}

double first_moment_windowed(const ProbabilityMeasure& mu, const GridSpec& spec) {
    // tail check: measures reaching past the window make the first moment
    // (and the CDF-difference integrals) unreliable
    const double in_mass = mu.cdf(spec.hi) - mu.cdf(spec.lo);
    return 1.0 - in_mass;
}

}  // namespace

GridFunction mixed_density(const ProbabilityMeasure& muX, const NoiseModel& noise,
                           const GridSpec& spec) {
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);
    auto mu_hat = cf_on_grid(muX, spec, freqs);
    std::vector<std::complex<double>> fy(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) fy[j] = noise.cf(freqs[j]) * mu_hat[j];
    return fourier_inverse(Spectrum(spec.lo, spec.hi, std::move(freqs), std::move(fy)));
}

InversionReport inversion_components(const ProbabilityMeasure& muX,
                                     const ProbabilityMeasure& mu0X, const NoiseModel& noise,
                                     double h, std::optional<double> alpha,
                                     const GridSpec& spec) {
    if (first_moment_windowed(muX, spec) > 1e-4 || first_moment_windowed(mu0X, spec) > 1e-4)
        throw std::invalid_argument(
            "inversion_components: measure mass escapes the window (first moment unreliable)");

    OperatorBundle bundle = build_bundle(noise, h, spec);

    GridFunction fy = mixed_density(muX, noise, spec);
    GridFunction f0y = mixed_density(mu0X, noise, spec);
    std::vector<double> dvals(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k) dvals[k] = fy[k] - f0y[k];
    GridFunction ddens(spec.lo, spec.hi, std::move(dvals));
    GridFunction dcdf = cumulative_trapezoid(ddens);  // F_Y - F_0Y

    InversionReport rep;
    rep.h = h;
    rep.w1_actual = w1(muX, mu0X);
    rep.bias_term = alpha ? std::pow(h, *alpha + 1.0) : h;
    rep.t1 = norms(convolve(bundle.k1h, dcdf)).l1;
    rep.t2_w1 = norms(convolve(bundle.k2h, dcdf)).l1;
    rep.t2_tv = norms(convolve(bundle.f2h, ddens)).l1;
    rep.bound_w1 = rep.bias_term + rep.t1 + rep.t2_w1;
    rep.bound_tv = rep.bias_term + rep.t1 + rep.t2_tv;
    rep.slack = rep.w1_actual > 0.0 ? rep.bound_tv / rep.w1_actual
                                    : std::numeric_limits<double>::infinity();
    return rep;
}

InversionReport optimize_h(const ProbabilityMeasure& muX, const ProbabilityMeasure& mu0X,
                           const NoiseModel& noise, const std::vector<double>& h_grid,
                           std::optional<double> alpha, const GridSpec& spec) {
    if (h_grid.empty()) throw std::invalid_argument("optimize_h: empty h grid");
    InversionReport best;
    bool have = false;
    for (double h : h_grid) {
        InversionReport rep = inversion_components(muX, mu0X, noise, h, alpha, spec);
        if (!have || rep.bound_tv < best.bound_tv) {
            best = rep;
            have = true;
        }
    }
    return best;
}

RateExponents rate_exponents(std::optional<double> alpha, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("rate_exponents: beta must be positive");
    const double bv1 = std::max(beta, 1.0);
    const double a = alpha.value_or(0.0);
    RateExponents out;
    out.direct_to_w1 = alpha ? (a + 1.0) / (a + bv1) : 1.0 / bv1;
    out.w1_rate_from_root_n = (a + 1.0) / (2.0 * a + std::max(2.0 * beta, 1.0) + 1.0);
    return out;
}

VerifySummary verify_inequality(
    const std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>>& pairs,
    const NoiseModel& noise, const std::vector<double>& h_grid,
    const std::vector<std::optional<double>>& alphas, const GridSpec& spec,
    std::size_t calibration_count) {
    if (pairs.size() < 5)
        throw std::invalid_argument("verify_inequality: need at least 5 test pairs");
    if (alphas.size() != pairs.size())
        throw std::invalid_argument("verify_inequality: one alpha entry per pair required");
    calibration_count = std::min(calibration_count, pairs.size());

    VerifySummary out;
    out.reports.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        out.reports.push_back(
            optimize_h(pairs[i].first, pairs[i].second, noise, h_grid, alphas[i], spec));

    double c = 1.0;  // the inequality cannot hold with constant below its floor
    for (std::size_t i = 0; i < calibration_count; ++i) {
        const auto& r = out.reports[i];
        if (r.w1_actual > 0.0) c = std::max(c, r.w1_actual / r.bound_tv);
    }
    out.fitted_constant = c;

    out.pass = true;
    out.worst_slack = std::numeric_limits<double>::infinity();
    for (const auto& r : out.reports) {
        if (r.w1_actual <= 0.0) continue;
        const double slack = c * r.bound_tv / r.w1_actual;
        out.worst_slack = std::min(out.worst_slack, slack);
        if (slack < 1.0) out.pass = false;
    }
    return out;
}

}  // namespace wdecon
