#include "wdecon/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wdecon {

namespace {

constexpr double kPi = std::numbers::pi;

void require_grid(std::size_t n) {
    if (n < 8 || !std::has_single_bit(n))
        throw std::invalid_argument("grid size must be a power of two >= 8");
}

void require_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite value in grid function");
}

}  // namespace

GridFunction::GridFunction(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
    if (!(hi > lo)) throw std::invalid_argument("grid domain must satisfy hi > lo");
    require_grid(values_.size());
    require_finite(values_);
}

double GridFunction::at(double xq) const {
    if (xq < lo_ || xq > hi_) return 0.0;
    const double s = (xq - lo_) / spacing();
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= values_.size()) return values_.back();
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

Spectrum::Spectrum(double x_lo, double x_hi, std::vector<double> freqs,
                   std::vector<std::complex<double>> values)
    : x_lo_(x_lo), x_hi_(x_hi), freqs_(std::move(freqs)), values_(std::move(values)) {
    if (!(x_hi > x_lo)) throw std::invalid_argument("spectrum window must satisfy hi > lo");
    if (freqs_.size() != values_.size())
        throw std::invalid_argument("spectrum freqs/values size mismatch");
    require_grid(values_.size());
}

double Spectrum::asymmetry() const {
    // bins 0 and n/2 are their own mirror partners; they are folded to
    // their real parts on inversion rather than judged here
    const std::size_t n = values_.size();
    double worst = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        if (j == n / 2) continue;
        // bin n-j holds frequency -t_j
        worst = std::max(worst, std::abs(values_[n - j] - std::conj(values_[j])));
    }
    return worst;
}

void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (!std::has_single_bit(n)) throw std::invalid_argument("fft size must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<double> fft_freqs(double lo, double hi, std::size_t n) {
    require_grid(n);
    const double dx = (hi - lo) / static_cast<double>(n - 1);
    const double dt = 2.0 * kPi / (static_cast<double>(n) * dx);
    std::vector<double> freqs(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double jt = (j < n / 2) ? static_cast<double>(j)
                                      : static_cast<double>(j) - static_cast<double>(n);
        freqs[j] = jt * dt;
    }
    return freqs;
}

Spectrum fourier_forward(const GridFunction& f) {
    const std::size_t n = f.size();
    const double dx = f.spacing();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t k = 0; k < n; ++k) buf[k] = f[k];
    fft_radix2(buf, +1);

    std::vector<double> freqs = fft_freqs(f.lo(), f.hi(), n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = freqs[j];
        // phase correction: sum over k started at x = lo, not 0
        buf[j] *= dx * std::complex<double>(std::cos(t * f.lo()), std::sin(t * f.lo()));
    }
    return Spectrum(f.lo(), f.hi(), std::move(freqs), std::move(buf));
}

GridFunction fourier_inverse(const Spectrum& s) {
    const std::size_t n = s.size();
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(s[j]));
    if (s.asymmetry() > 1e-6 * (1.0 + scale))
        throw std::invalid_argument("fourier_inverse: spectrum is not conjugate-symmetric");

    const double lo = s.x_lo();
    const double dx = (s.x_hi() - lo) / static_cast<double>(n - 1);
    std::vector<std::complex<double>> buf(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = s.freq(j);
        std::complex<double> v = s[j];
        if (j == 0 || j == n / 2) v = v.real();  // fold the unpaired bins
        buf[j] = v * std::complex<double>(std::cos(t * lo), -std::sin(t * lo));
    }
    fft_radix2(buf, -1);
    std::vector<double> vals(n);
    const double norm = 1.0 / (static_cast<double>(n) * dx);
    for (std::size_t k = 0; k < n; ++k) vals[k] = buf[k].real() * norm;
    return GridFunction(lo, s.x_hi(), std::move(vals));
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
    const double dx = f.spacing();
    if (std::abs(dx - g.spacing()) > 1e-12 * dx)
        throw std::invalid_argument("convolve: grid spacings differ");
    const std::size_t need = f.size() + g.size() - 1;
    const std::size_t padded = std::bit_ceil(need);

    std::vector<std::complex<double>> a(padded), b(padded);
    for (std::size_t k = 0; k < f.size(); ++k) a[k] = f[k];
    for (std::size_t k = 0; k < g.size(); ++k) b[k] = g[k];
    fft_radix2(a, +1);
    fft_radix2(b, +1);
    for (std::size_t j = 0; j < padded; ++j) a[j] *= b[j];
    fft_radix2(a, -1);

    std::vector<double> vals(padded);
    const double norm = dx / static_cast<double>(padded);
    for (std::size_t k = 0; k < padded; ++k) vals[k] = a[k].real() * norm;
    const double lo = f.lo() + g.lo();
    return GridFunction(lo, lo + dx * static_cast<double>(padded - 1), std::move(vals));
}

Norms norms(const GridFunction& f) {
    const std::size_t n = f.size();
    const double dx = f.spacing();
    double s1 = 0.0, s2 = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = std::abs(f[k]);
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        s1 += w * a;
        s2 += w * a * a;
        sup = std::max(sup, a);
    }
    return Norms{s1 * dx, std::sqrt(s2 * dx), sup};
}

namespace {

double clipped_mass(const GridFunction& f, std::vector<double>& clipped) {
    const std::size_t n = f.size();
    clipped.resize(n);
    for (std::size_t k = 0; k < n; ++k) clipped[k] = std::max(f[k], 0.0);
    double mass = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        mass += (k == 0 || k + 1 == n) ? 0.5 * clipped[k] : clipped[k];
    return mass * f.spacing();
}

}  // namespace

double hellinger(const GridFunction& f, const GridFunction& g) {
    std::vector<double> fv, gv;
    const double mf = clipped_mass(f, fv);
    const double mg = clipped_mass(g, gv);
    if (std::abs(mf - 1.0) > 1e-3 || std::abs(mg - 1.0) > 1e-3)
        throw std::invalid_argument("hellinger: mass deficit beyond 1e-3, domain too small");
    if (f.size() != g.size() || std::abs(f.lo() - g.lo()) > 1e-9 ||
        std::abs(f.hi() - g.hi()) > 1e-9)
        throw std::invalid_argument("hellinger: grids differ");
    const std::size_t n = f.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::sqrt(fv[k]) - std::sqrt(gv[k]);
        acc += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * d * d;
    }
    return std::sqrt(acc * f.spacing());
}

GridFunction cdf_from_density(const GridFunction& f) {
    const std::size_t n = f.size();
    const double dx = f.spacing();
    std::vector<double> c(n);
    c[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double fk = std::max(f[k], 0.0);
        const double fp = std::max(f[k - 1], 0.0);
        c[k] = c[k - 1] + 0.5 * dx * (fk + fp);
    }
    const double total = c[n - 1];
    if (!(total > 0.0)) throw std::invalid_argument("cdf_from_density: zero total mass");
    if (std::abs(total - 1.0) > 1e-3)
        throw std::invalid_argument("cdf_from_density: density does not integrate to ~1");
    double run = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        run = std::max(run, c[k] / total);
        c[k] = std::min(run, 1.0);
    }
    return GridFunction(f.lo(), f.hi(), std::move(c));
}

GridFunction cumulative_trapezoid(const GridFunction& f) {
    const std::size_t n = f.size();
    const double dx = f.spacing();
    std::vector<double> c(n);
    c[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) c[k] = c[k - 1] + 0.5 * dx * (f[k] + f[k - 1]);
    return GridFunction(f.lo(), f.hi(), std::move(c));
}

GridFunction resample(const GridFunction& f, const GridSpec& spec) {
    const double dx = (spec.hi - spec.lo) / static_cast<double>(spec.n - 1);
    std::vector<double> vals(spec.n);
    for (std::size_t k = 0; k < spec.n; ++k)
        vals[k] = f.at(spec.lo + dx * static_cast<double>(k));
    return GridFunction(spec.lo, spec.hi, std::move(vals));
}

void write_csv(const GridFunction& f, std::ostream& os) {
    os << "x,value\n";
    char line[64];
    for (std::size_t k = 0; k < f.size(); ++k) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", f.x(k), f[k]);
        os << line;
    }
}

GridFunction read_csv(std::istream& is) {
    std::string header;
    std::getline(is, header);
    std::vector<double> xs, vs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 8) throw std::invalid_argument("read_csv: too few rows");
    return GridFunction(xs.front(), xs.back(), std::move(vs));
}

namespace {

void put_f64le(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    char raw[8];
    for (int i = 0; i < 8; ++i) raw[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(raw, 8);
}

double get_f64le(std::istream& is) {
    char raw[8];
    is.read(raw, 8);
    if (!is) throw std::runtime_error("binary grid dump truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace

void write_binary(const GridFunction& f, std::ostream& os) {
    put_f64le(os, f.lo());
    put_f64le(os, f.hi());
    put_f64le(os, static_cast<double>(f.size()));
    for (std::size_t k = 0; k < f.size(); ++k) put_f64le(os, f[k]);
}

GridFunction read_binary(std::istream& is) {
    const double lo = get_f64le(is);
    const double hi = get_f64le(is);
    const auto n = static_cast<std::size_t>(get_f64le(is));
    std::vector<double> vals(n);
    for (auto& v : vals) v = get_f64le(is);
    return GridFunction(lo, hi, std::move(vals));
}

}  // namespace wdecon
