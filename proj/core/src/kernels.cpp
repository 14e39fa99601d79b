#include "wdecon/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wdecon {

namespace {

double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double chi(double t) {
    const double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double s = a - 1.0;
    return std::exp(1.0) * std::exp(-1.0 / (1.0 - s * s));
}

double flattop_hat(double t) {
    const double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double up = bump(2.0 - a);
    const double down = bump(a - 1.0);
    return up / (up + down);
}

GridFunction FlatTopKernel::rescaled(double h) const {
    const std::size_t n = k.size();
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) vals[i] = k.at(k.x(i) / h) / h;
    return GridFunction(k.lo(), k.hi(), std::move(vals));
}

FlatTopKernel build_flattop(double h, const GridSpec& spec) {
    if (!(h > 0.0)) throw std::invalid_argument("build_flattop: h must be positive");
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);
    const double dt = freqs[1];
    const double t_max = -freqs[spec.n / 2];
    if (2.0 / h > t_max)
        throw std::invalid_argument("build_flattop: 2/h exceeds the spectral range");
    if ((1.0 / h) / dt < 64.0)
        throw std::invalid_argument("build_flattop: fewer than 64 bins across the shoulder");

    std::vector<std::complex<double>> vals(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) vals[j] = flattop_hat(freqs[j]);
    Spectrum khat(spec.lo, spec.hi, std::move(freqs), std::move(vals));
    GridFunction k = fourier_inverse(khat);
    return FlatTopKernel{std::move(khat), std::move(k)};
}

OperatorBundle build_bundle(const NoiseModel& noise, double h, const GridSpec& spec) {
    if (!(h > 0.0) || h > 0.5)
        throw std::invalid_argument("build_bundle: h must lie in (0, 1/2]");
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);
    const double t_max = -freqs[spec.n / 2];
    if (2.0 / h > t_max)
        throw std::invalid_argument("build_bundle: support 2/h of w2h exceeds the spectral range");

    const std::size_t n = spec.n;
    std::vector<std::complex<double>> w1(n), w2(n), f2hat(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = freqs[j];
        const double kt = flattop_hat(h * t);
        const double ct = chi(t);
        std::complex<double> r = 0.0;
        if (kt != 0.0) {
            r = noise.rinv(t, 0);
            if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
                throw std::runtime_error("build_bundle: r overflows near |t| = 2/h");
        }
        w1[j] = kt * ct * r;
        w2[j] = kt * (1.0 - ct) * r;
        f2hat[j] = (t == 0.0) ? 0.0 : w2[j] / std::complex<double>(0.0, -t);
    }

    // chi over t, ascending order for readability
    std::vector<double> chi_vals(n);
    const double dt = freqs[1];
    const double lo_t = -static_cast<double>(n / 2) * dt;
    for (std::size_t j = 0; j < n; ++j)
        chi_vals[j] = chi(lo_t + dt * static_cast<double>(j));
    GridFunction chi_grid(lo_t, lo_t + dt * static_cast<double>(n - 1), std::move(chi_vals));

    Spectrum w1h(spec.lo, spec.hi, freqs, std::move(w1));
    Spectrum w2h(spec.lo, spec.hi, freqs, std::move(w2));
    GridFunction k1h = fourier_inverse(w1h);
    GridFunction k2h = fourier_inverse(w2h);
    GridFunction f2h = fourier_inverse(Spectrum(spec.lo, spec.hi, freqs, std::move(f2hat)));
    return OperatorBundle{h,        noise,          std::move(chi_grid), std::move(w1h),
                          std::move(w2h), std::move(k1h), std::move(k2h),      std::move(f2h)};
}

std::vector<OperatorNormRow> operator_norms(const NoiseModel& noise,
                                            const std::vector<double>& h_list,
                                            const GridSpec& spec) {
    std::vector<OperatorNormRow> rows;
    rows.reserve(h_list.size());
    for (double h : h_list) {
        OperatorBundle b = build_bundle(noise, h, spec);
        rows.push_back(OperatorNormRow{h, norms(b.k1h).l1, norms(b.k2h).l1, norms(b.f2h).l1});
    }
    std::sort(rows.begin(), rows.end(),
              [](const OperatorNormRow& a, const OperatorNormRow& b) { return a.h > b.h; });
    return rows;
}

namespace detail {

double bias_l1_from_spectrum(std::vector<std::complex<double>> bhat, const GridSpec& spec) {
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);
    GridFunction b = fourier_inverse(Spectrum(spec.lo, spec.hi, std::move(freqs), std::move(bhat)));
    return norms(b).l1;
}

}  // namespace detail

double cdf_bias(const GridFunction& cdf_fn, double h, const GridSpec& spec) {
    // fourth-order central derivative of F, clamped at the (flat) ends
    const std::size_t n = cdf_fn.size();
    const double dx = cdf_fn.spacing();
    std::vector<double> f(n);
    auto at = [&](std::ptrdiff_t i) {
        i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1);
        return cdf_fn[static_cast<std::size_t>(i)];
    };
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
        f[static_cast<std::size_t>(i)] =
            (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dx);
    GridFunction density(cdf_fn.lo(), cdf_fn.hi(), std::move(f));
    Spectrum fhat = fourier_forward(resample(density, spec));

    std::vector<std::complex<double>> bhat(spec.n);
    bool any = false;
    for (std::size_t j = 0; j < spec.n; ++j) {
        const double t = fhat.freq(j);
        const double kt = flattop_hat(h * t);
        if (t == 0.0 || kt == 1.0) {
            bhat[j] = 0.0;
        } else {
            bhat[j] = fhat[j] * (kt - 1.0) / std::complex<double>(0.0, -t);
            any = true;
        }
    }
    if (!any)
        throw std::invalid_argument("cdf_bias: 1/h beyond the spectral range, bias unresolved");
    return detail::bias_l1_from_spectrum(std::move(bhat), spec);
}

double gaussmix_bias_check(const ProbabilityMeasure& muH, double h, double alpha,
                           const GridSpec& spec) {
    const double sigma =
        std::sqrt(2.0) * h * std::sqrt((2.0 * alpha + 1.0) * std::abs(std::log(h)));
    const auto* d = std::get_if<ProbabilityMeasure::Discrete>(&muH.repr());
    const auto* e = std::get_if<ProbabilityMeasure::Empirical>(&muH.repr());
    if (!d && !e)
        throw std::invalid_argument("gaussmix_bias_check: muH must be discrete or empirical");
    const std::vector<double>& atoms = d ? d->atoms : e->sample;
    std::vector<double> weights;
    if (d) {
        weights = d->weights;
    } else {
        weights.assign(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    }
    auto fhat = [&](double t) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            acc += weights[i] * std::complex<double>(std::cos(t * atoms[i]), std::sin(t * atoms[i]));
        return acc * std::exp(-0.5 * sigma * sigma * t * t);
    };
    return cdf_bias_spectral(fhat, h, spec);
}

}  // namespace wdecon
