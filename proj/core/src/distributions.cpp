#include "wdecon/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wdecon {

namespace {

constexpr double kPi = std::numbers::pi;

double lgamma_pos(double x) { return std::lgamma(x); }

}  // namespace

NoiseModel::NoiseModel(NoiseKind kind, double beta, double scale)
    : kind_(kind), beta_(beta), scale_(scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("noise scale must be positive");
}

NoiseModel NoiseModel::laplace(double scale) { return NoiseModel(NoiseKind::Laplace, 2.0, scale); }

NoiseModel NoiseModel::linnik(double beta, double scale) {
    if (!(beta > 0.0) || beta > 2.0)
        throw std::invalid_argument("Linnik index must lie in (0, 2]");
    if (beta == 2.0) return laplace(scale);  // the mixing density degenerates at beta = 2
    return NoiseModel(NoiseKind::Linnik, beta, scale);
}

NoiseModel NoiseModel::gamma(double beta, double scale) {
    if (!(beta > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    return NoiseModel(NoiseKind::Gamma, beta, scale);
}

NoiseModel NoiseModel::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const double par = (colon == std::string::npos) ? 0.0 : std::stod(spec.substr(colon + 1));
    if (head == "laplace") return laplace();
    if (head == "linnik") return linnik(par);
    if (head == "gamma") return gamma(par);
    throw std::invalid_argument("unknown noise spec: " + spec);
}

std::string NoiseModel::name() const {
    char buf[48];
    switch (kind_) {
        case NoiseKind::Laplace: return "laplace";
        case NoiseKind::Linnik:
            std::snprintf(buf, sizeof buf, "linnik:%g", beta_);
            return buf;
        case NoiseKind::Gamma:
            std::snprintf(buf, sizeof buf, "gamma:%g", beta_);
            return buf;
    }
    return "?";
}

std::complex<double> NoiseModel::cf(double t) const {
    const double ts = scale_ * t;
    switch (kind_) {
        case NoiseKind::Laplace:
            return 1.0 / (1.0 + ts * ts);
        case NoiseKind::Linnik:
            return 1.0 / (1.0 + std::pow(std::abs(ts), beta_));
        case NoiseKind::Gamma:
            return std::pow(std::complex<double>(1.0, -ts), -beta_);
    }
    return {};
}

std::complex<double> NoiseModel::rinv(double t, int l) const {
    if (l != 0 && l != 1) throw std::invalid_argument("rinv: l must be 0 or 1");
    const double ts = scale_ * t;
    switch (kind_) {
        case NoiseKind::Laplace:
            if (l == 0) return 1.0 + ts * ts;
            return 2.0 * scale_ * ts;
        case NoiseKind::Linnik: {
            if (l == 0) return 1.0 + std::pow(std::abs(ts), beta_);
            if (ts == 0.0) {
                if (beta_ < 1.0)
                    throw std::domain_error("Linnik r' is singular at t = 0 for beta < 1");
                return 0.0;
            }
            const double sgn = ts > 0.0 ? 1.0 : -1.0;
            return scale_ * beta_ * sgn * std::pow(std::abs(ts), beta_ - 1.0);
        }
        case NoiseKind::Gamma: {
            const std::complex<double> base(1.0, -ts);
            if (l == 0) return std::pow(base, beta_);
            return std::complex<double>(0.0, -scale_ * beta_) * std::pow(base, beta_ - 1.0);
        }
    }
    return {};
}

double NoiseModel::density_at(double u) const {
    const double z = u / scale_;
    switch (kind_) {
        case NoiseKind::Laplace:
            return 0.5 * std::exp(-std::abs(z)) / scale_;
        case NoiseKind::Gamma:
            if (z <= 0.0) return 0.0;
            return std::exp((beta_ - 1.0) * std::log(z) - z - lgamma_pos(beta_)) / scale_;
        case NoiseKind::Linnik:
            throw std::logic_error("Linnik density has no closed form; use density()");
    }
    return 0.0;
}

GridFunction NoiseModel::density(double lo, double hi, std::size_t n) const {
    if (kind_ == NoiseKind::Linnik) {
        if (beta_ <= 0.5)
            throw std::invalid_argument(
                "Linnik density for beta <= 0.5 exceeds the grid resolution budget");
        // invert the characteristic function, then clip ringing and renormalize
        auto freqs = fft_freqs(lo, hi, n);
        std::vector<std::complex<double>> vals(n);
        for (std::size_t j = 0; j < n; ++j) vals[j] = cf(freqs[j]);
        GridFunction raw = fourier_inverse(Spectrum(lo, hi, std::move(freqs), std::move(vals)));
        std::vector<double> clipped(n);
        for (std::size_t k = 0; k < n; ++k) clipped[k] = std::max(raw[k], 0.0);
        double mass = 0.0;
        const double dx = raw.spacing();
        for (std::size_t k = 0; k < n; ++k)
            mass += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * clipped[k] * dx;
        for (auto& v : clipped) v /= mass;
        return GridFunction(lo, hi, std::move(clipped));
    }
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    for (std::size_t k = 0; k < n; ++k) vals[k] = density_at(lo + dx * static_cast<double>(k));
    return GridFunction(lo, hi, std::move(vals));
}

double linnik_mixing_pdf(double beta, double v) {
    if (!(beta > 0.0) || beta >= 2.0)
        throw std::invalid_argument("linnik_mixing_pdf: beta must lie in (0, 2)");
    if (!(v > 0.0)) throw std::invalid_argument("linnik_mixing_pdf: v must be positive");
    const double theta = kPi * beta / 2.0;
    const double vb = std::pow(v, beta);
    return (2.0 / kPi) * std::sin(theta) * std::pow(v, beta - 1.0) /
           (1.0 + vb * vb + 2.0 * vb * std::cos(theta));
}

double linnik_mixing_cdf(double beta, double v) {
    if (!(beta > 0.0) || beta >= 2.0)
        throw std::invalid_argument("linnik_mixing_cdf: beta must lie in (0, 2)");
    if (v <= 0.0) return 0.0;
    // z = v^beta turns the law into a shifted Cauchy-type one with antiderivative
    // arctan((z + cos(theta))/sin(theta))
    const double theta = kPi * beta / 2.0;
    const double z = std::pow(v, beta);
    const double a0 = std::atan(std::cos(theta) / std::sin(theta));  // = pi/2 - theta
    const double az = std::atan((z + std::cos(theta)) / std::sin(theta));
    return (az - a0) / theta;
}

double linnik_sample_scale(double beta, Rng& rng) {
    if (!(beta > 0.0) || beta >= 2.0)
        throw std::invalid_argument("linnik_sample_scale: beta must lie in (0, 2)");
    const double theta = kPi * beta / 2.0;
    const double u = rng.uniform();
    // invert: arctan((z+cos)/sin) = pi/2 - theta + u*theta
    const double z = std::sin(theta) * std::tan(kPi / 2.0 - theta * (1.0 - u)) - std::cos(theta);
    return std::pow(z, 1.0 / beta);
}

double NoiseModel::sample_one(Rng& rng) const {
    switch (kind_) {
        case NoiseKind::Laplace:
            return scale_ * rng.laplace();
        case NoiseKind::Linnik: {
            const double v = linnik_sample_scale(beta_, rng);
            return scale_ * rng.laplace() / v;
        }
        case NoiseKind::Gamma:
            return scale_ * rng.gamma(beta_);
    }
    return 0.0;
}

std::vector<double> NoiseModel::sample(std::size_t n, Rng& rng) const {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<double> out(n);
    for (auto& v : out) v = sample_one(rng);
    return out;
}

namespace {

GridFunction normal_mixture_density(double lo, double hi, std::size_t n,
                                    const std::vector<double>& locs,
                                    const std::vector<double>& weights, double sd) {
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    std::vector<double> vals(n, 0.0);
    const double c = 1.0 / (sd * std::sqrt(2.0 * kPi));
    for (std::size_t k = 0; k < n; ++k) {
        const double x = lo + dx * static_cast<double>(k);
        double acc = 0.0;
        for (std::size_t m = 0; m < locs.size(); ++m) {
            const double z = (x - locs[m]) / sd;
            acc += weights[m] * std::exp(-0.5 * z * z);
        }
        vals[k] = c * acc;
    }
    return GridFunction(lo, hi, std::move(vals));
}

GridFunction renormalize(const GridFunction& f) {
    const double mass = norms(f).l1;
    std::vector<double> vals(f.values());
    for (auto& v : vals) v = std::max(v, 0.0) / mass;
    return GridFunction(f.lo(), f.hi(), std::move(vals));
}

}  // namespace

SignalPreset SignalPreset::get(const std::string& name, double lo, double hi, std::size_t n) {
    if (name == "gmix2") {
        // 0.5 N(-1, 0.25) + 0.5 N(1, 0.25)
        GridFunction d = normal_mixture_density(lo, hi, n, {-1.0, 1.0}, {0.5, 0.5}, 0.5);
        return SignalPreset{name, 10.0, 5.0, 0.0, d, cdf_from_density(d)};
    }
    if (name == "laplace-signal") {
        const double dx = (hi - lo) / static_cast<double>(n - 1);
        std::vector<double> vals(n);
        for (std::size_t k = 0; k < n; ++k)
            vals[k] = 0.5 * std::exp(-std::abs(lo + dx * static_cast<double>(k)));
        GridFunction d(lo, hi, std::move(vals));
        // alpha: any value below 1 satisfies the integrability condition on |t|^a/(1+t^2)
        return SignalPreset{name, 0.95, 0.0, 0.0, d, cdf_from_density(d)};
    }
    if (name == "smoothed-uniform") {
        // uniform on [-1,1] mollified by a narrow normal, then renormalized
        const double tau = 0.05;
        const double dx = (hi - lo) / static_cast<double>(n - 1);
        std::vector<double> vals(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double x = lo + dx * static_cast<double>(k);
            const double a = (x + 1.0) / (tau * std::sqrt(2.0));
            const double b = (x - 1.0) / (tau * std::sqrt(2.0));
            vals[k] = 0.25 * (std::erf(a) - std::erf(b));
        }
        GridFunction d = renormalize(GridFunction(lo, hi, std::move(vals)));
        return SignalPreset{name, 10.0, 10.0, 0.0, d, cdf_from_density(d)};
    }
    throw std::invalid_argument("unknown signal preset: " + name);
}

double SignalPreset::sample_one(Rng& rng) const {
    const double u = rng.uniform();
    // binary search the CDF grid, then linear interpolation
    const auto& c = cdf.values();
    auto it = std::lower_bound(c.begin(), c.end(), u);
    if (it == c.begin()) return cdf.lo();
    if (it == c.end()) return cdf.hi();
    const auto k = static_cast<std::size_t>(it - c.begin());
    const double c0 = c[k - 1], c1 = c[k];
    const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    return cdf.x(k - 1) + w * cdf.spacing();
}

ModelSample simulate(const SignalPreset& preset, const NoiseModel& noise, std::size_t n,
                     std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("simulate: n must be >= 1");
    Rng rng_x = Rng::stream(seed, 1);
    Rng rng_e = Rng::stream(seed, 2);
    ModelSample out;
    out.seed = seed;
    out.x.resize(n);
    out.eps.resize(n);
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.x[i] = preset.sample_one(rng_x);
        out.eps[i] = noise.sample_one(rng_e);
        out.y[i] = out.x[i] + out.eps[i];
    }
    return out;
}

}  // namespace wdecon
