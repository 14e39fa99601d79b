#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "wdecon/numerics.hpp"
#include "wdecon/rng.hpp"

namespace wdecon {

enum class NoiseKind { Laplace, Linnik, Gamma };

//! Additive noise law with closed-form characteristic function and
//! reciprocal r(t) = 1/cf(t).
//!
//! Laplace: cf = 1/(1+t^2), smoothness index beta = 2. Linnik(beta),
//! beta in (0,2]: cf = 1/(1+|t|^beta); beta = 2 dispatches to the Laplace
//! closed forms exactly. Gamma(beta): cf = (1-it)^{-beta}. A scale s
//! multiplies the noise variable, so cf_s(t) = cf(st).
class NoiseModel {
public:
    static NoiseModel laplace(double scale = 1.0);
    static NoiseModel linnik(double beta, double scale = 1.0);
    static NoiseModel gamma(double beta, double scale = 1.0);

    //! Parse "laplace", "linnik:1.5" or "gamma:1.0".
    static NoiseModel parse(const std::string& spec);

    NoiseKind kind() const { return kind_; }
    //! Ordinary-smoothness index: the decay exponent of |cf|.
    double beta() const { return beta_; }
    double scale() const { return scale_; }
    std::string name() const;

    std::complex<double> cf(double t) const;
    //! r(t) = 1/cf(t) for l = 0, its derivative for l = 1.
    std::complex<double> rinv(double t, int l) const;
    //! Noise density realized on [lo, hi] with n grid points.
    GridFunction density(double lo, double hi, std::size_t n) const;
    //! Closed-form density where one exists (Laplace, Gamma); used by the
    //! grid realization and directly by the samplers' likelihoods.
    double density_at(double u) const;

    std::vector<double> sample(std::size_t n, Rng& rng) const;
    double sample_one(Rng& rng) const;

private:
    NoiseModel(NoiseKind kind, double beta, double scale);
    NoiseKind kind_;
    double beta_;
    double scale_;
};

//! Mixing density of the Linnik scale-mixture-of-Laplace representation:
//! f_V(v; beta) = (2/pi) sin(pi beta/2) v^{beta-1} /
//!                (1 + v^{2 beta} + 2 v^beta cos(pi beta/2)), v > 0.
double linnik_mixing_pdf(double beta, double v);

//! Closed-form CDF of f_V(.; beta) (via the substitution z = v^beta).
double linnik_mixing_cdf(double beta, double v);

//! Exact inverse-CDF draw of the Laplace-rate variable V.
double linnik_sample_scale(double beta, Rng& rng);

//! Signal law with documented regularity metadata.
struct SignalPreset {
    std::string name;
    double alpha;          // Sobolev/Hoelder regularity used in rate predictions
    double tail_constant;  // C0 in f(x) <~ e^{-(1+C0)|x|}
    double first_moment;
    GridFunction density;
    GridFunction cdf;

    //! Shipped presets: "gmix2", "laplace-signal", "smoothed-uniform".
    static SignalPreset get(const std::string& name, double lo = -40.0, double hi = 40.0,
                            std::size_t n = 1 << 14);
    //! Inverse-CDF draw on the preset grid.
    double sample_one(Rng& rng) const;
};

//! A draw of the additive-noise model Y = X + eps.
struct ModelSample {
    std::vector<double> y;
    std::vector<double> x;    // latent, retained for oracle evaluation
    std::vector<double> eps;
    std::uint64_t seed;
};

//! Deterministic given the seed: y[i] = x[i] + eps[i] exactly.
ModelSample simulate(const SignalPreset& preset, const NoiseModel& noise, std::size_t n,
                     std::uint64_t seed);

}  // namespace wdecon
