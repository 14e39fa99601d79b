#pragma once

#include <vector>

#include "wdecon/distributions.hpp"
#include "wdecon/numerics.hpp"
#include "wdecon/wasserstein.hpp"

namespace wdecon {

//! Smooth cutoff: 1 on [-1,1], 0 outside [-2,2],
//! e * exp(-1/(1-(|t|-1)^2)) on the shoulder. Continuously differentiable.
double chi(double t);

//! Flat-top transform: 1 on [-1,1], 0 outside [-2,2], with a C-infinity
//! shoulder built from the same exp(-1/x) bump family as chi, so every
//! kernel moment beyond the zeroth vanishes.
double flattop_hat(double t);

//! Smoothing kernel with compactly supported transform.
struct FlatTopKernel {
    Spectrum khat;   // flattop_hat sampled on the spectral grid
    GridFunction k;  // the kernel itself

    //! Rescaled kernel K_h(.) = K(./h)/h on the same window.
    GridFunction rescaled(double h) const;
};

//! Realize the flat-top kernel on the window `spec`. Rejects h for which
//! the spectral shoulder [1/h, 2/h] is not resolved by at least 64 bins or
//! does not fit the frequency range.
FlatTopKernel build_flattop(double h, const GridSpec& spec);

//! The h-indexed inversion operators of the smoothing inequality,
//! realized as grid/spectrum pairs on one window:
//!   w1h(t) = Khat(ht) chi(t) r(t),   w2h(t) = Khat(ht) (1-chi(t)) r(t),
//! k1h, k2h their inverse transforms, f2h the antiderivative of k2h
//! (inverse transform of w2h/(-it), safe since w2h vanishes on [-1,1]).
struct OperatorBundle {
    double h;
    NoiseModel noise;
    GridFunction chi_grid;  // cutoff sampled over t, ascending
    Spectrum w1h;
    Spectrum w2h;
    GridFunction k1h;
    GridFunction k2h;
    GridFunction f2h;
};

OperatorBundle build_bundle(const NoiseModel& noise, double h, const GridSpec& spec);

struct OperatorNormRow {
    double h;
    double k1_l1;
    double k2_l1;
    double f2_l1;
};

//! L1 norms of the bundle operators for each h, sorted by h descending.
std::vector<OperatorNormRow> operator_norms(const NoiseModel& noise,
                                            const std::vector<double>& h_list,
                                            const GridSpec& spec);

//! ||F * K_h - F||_1 for a grid CDF F: the kernel-smoothing bias of a
//! distribution function. Computed spectrally on the derivative of F.
double cdf_bias(const GridFunction& cdf_fn, double h, const GridSpec& spec);

//! Same bias evaluated from a closed-form density spectrum fhat(t).
template <class Fhat>
double cdf_bias_spectral(Fhat&& fhat, double h, const GridSpec& spec);

//! Bias of the CDF of muH * phi_sigma with sigma tied to h as
//! sigma = sqrt(2) h sqrt((2 alpha + 1) |log h|); uniform over muH.
double gaussmix_bias_check(const ProbabilityMeasure& muH, double h, double alpha,
                           const GridSpec& spec);

namespace detail {
double bias_l1_from_spectrum(std::vector<std::complex<double>> bhat, const GridSpec& spec);
}

template <class Fhat>
double cdf_bias_spectral(Fhat&& fhat, double h, const GridSpec& spec) {
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);
    std::vector<std::complex<double>> bhat(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const double t = freqs[j];
        const double kt = flattop_hat(h * t);
        if (t == 0.0 || kt == 1.0) {
            bhat[j] = 0.0;
        } else {
            bhat[j] = fhat(t) * (kt - 1.0) / std::complex<double>(0.0, -t);
        }
    }
    return detail::bias_l1_from_spectrum(std::move(bhat), spec);
}

}  // namespace wdecon
