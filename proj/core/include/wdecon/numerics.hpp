#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace wdecon {

//! Real-valued function sampled on a uniform grid with explicit domain.
//!
//! Carrier for densities, CDFs and kernel realizations. Immutable after
//! construction; the grid has n points (n a power of two, n >= 8) at
//! spacing (hi - lo)/(n - 1), endpoints included.
class GridFunction {
public:
    GridFunction(double lo, double hi, std::vector<double> values);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t size() const { return values_.size(); }
    double spacing() const { return (hi_ - lo_) / static_cast<double>(values_.size() - 1); }
    double x(std::size_t i) const { return lo_ + spacing() * static_cast<double>(i); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    //! Linear interpolation; 0 outside [lo, hi].
    double at(double x) const;

private:
    double lo_;
    double hi_;
    std::vector<double> values_;
};

//! Complex spectrum on the FFT frequency grid of a GridFunction.
//!
//! Frequencies are angular (t in f^(t) = ∫ e^{itx} f(x) dx) and stored in
//! wrapped FFT order: index j holds t_j = 2π·j̃/(nΔ) with j̃ = j for
//! j < n/2 and j - n otherwise. The spatial window [x_lo, x_hi] of the
//! originating (or intended) grid travels with the spectrum so that
//! fourier_inverse lands back on it.
class Spectrum {
public:
    Spectrum(double x_lo, double x_hi, std::vector<double> freqs,
             std::vector<std::complex<double>> values);

    std::size_t size() const { return values_.size(); }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    double freq(std::size_t j) const { return freqs_[j]; }
    const std::vector<double>& freqs() const { return freqs_; }
    const std::complex<double>& operator[](std::size_t j) const { return values_[j]; }
    const std::vector<std::complex<double>>& values() const { return values_; }

    //! Max deviation from conjugate symmetry values(-t) = conj(values(t)).
    double asymmetry() const;

private:
    double x_lo_;
    double x_hi_;
    std::vector<double> freqs_;
    std::vector<std::complex<double>> values_;
};

//! Uniform grid layout request: n points (power of two) on [lo, hi].
struct GridSpec {
    double lo;
    double hi;
    std::size_t n;
};

struct Norms {
    double l1;
    double l2;
    double sup;
};

//! In-place radix-2 complex FFT; sign = +1 applies the e^{+i2πjk/n} kernel.
void fft_radix2(std::vector<std::complex<double>>& a, int sign);

//! Continuous-convention Fourier transform f^(t) = ∫ e^{itx} f(x) dx on the
//! FFT frequency grid, with phase correction for the domain offset.
Spectrum fourier_forward(const GridFunction& f);

//! Inverse transform f(x) = (2π)^{-1} ∫ e^{-itx} f^(t) dt back onto the grid
//! the spectrum came from. Rejects spectra that are not conjugate-symmetric.
GridFunction fourier_inverse(const Spectrum& s);

//! Frequency grid matching a spatial window [lo, hi] with n points, in
//! wrapped FFT order; for assembling spectra from closed-form transforms.
std::vector<double> fft_freqs(double lo, double hi, std::size_t n);

//! Linear convolution (f * g)(x) = ∫ f(x-u) g(u) du via zero-padded spectral
//! multiplication. Grids must share the spacing; the result lives on
//! [f.lo + g.lo, ...] with the same spacing, padded to a power of two.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

//! Trapezoid L1, L2 and sup norms.
Norms norms(const GridFunction& f);

//! Hellinger distance ||sqrt(f) - sqrt(g)||_2 between grid densities.
//! Tiny negative quadrature noise is clipped at 0; a mass deficit beyond
//! 1e-3 on either input is rejected (domain too small).
double hellinger(const GridFunction& f, const GridFunction& g);

//! Cumulative trapezoid of a density, renormalized to end exactly at 1 and
//! forced nondecreasing.
GridFunction cdf_from_density(const GridFunction& f);

//! Raw cumulative trapezoid (no renormalization, no clipping).
GridFunction cumulative_trapezoid(const GridFunction& f);

//! Linear-interpolation resampling onto a new window; zero outside [lo, hi].
GridFunction resample(const GridFunction& f, const GridSpec& spec);

//! CSV serialization, columns "x,value".
void write_csv(const GridFunction& f, std::ostream& os);
GridFunction read_csv(std::istream& is);

//! Compact binary dump: lo, hi, n as little-endian 64-bit floats, then values.
void write_binary(const GridFunction& f, std::ostream& os);
GridFunction read_binary(std::istream& is);

}  // namespace wdecon
