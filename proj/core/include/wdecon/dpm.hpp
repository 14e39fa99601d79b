#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wdecon/distributions.hpp"
#include "wdecon/numerics.hpp"
#include "wdecon/rng.hpp"
#include "wdecon/wasserstein.hpp"

namespace wdecon {

//! Dirichlet-process mixture-of-normals sampler configuration.
//!
//! Prior: mu_H ~ DP(concentration, H0) with base density
//! c0 exp(-b0 |u|^delta), sigma ~ inverse-gamma(nu, gamma); model
//! f_Y = f_eps * (mu_H * phi_sigma) with Laplace or Linnik(beta),
//! 1 < beta < 2, noise handled by scale-mixture augmentation.
struct DPMConfig {
    double concentration = 1.0;
    double base_b0 = 1.0;
    double base_delta = 1.0;
    double sigma_nu = 1.0;
    double sigma_gamma = 1.0;
    NoiseModel noise = NoiseModel::laplace();
    int aux_m = 3;
    std::size_t iters = 2000;
    std::size_t burn = 1000;
    std::size_t thin = 5;
    std::uint64_t seed = 1;
};

struct Cluster {
    double loc;
    int count;
};

//! Full latent state of the Gibbs sampler.
struct DPMState {
    std::vector<int> z;            // cluster label per observation
    std::vector<Cluster> clusters; // live clusters
    double sigma = 1.0;
    std::vector<double> w_aug;     // per-observation normal-scale variances
    std::vector<double> v_aug;     // per-observation Laplace rates (Linnik only)
};

//! Metropolis step sizes; adapted during burn-in, frozen afterwards.
struct GibbsScales {
    double step_loc = 0.5;
    double step_sigma = 0.4;
    std::size_t loc_proposals = 0, loc_accepts = 0;
    std::size_t sigma_proposals = 0, sigma_accepts = 0;
};

struct Snapshot {
    std::vector<double> atoms;
    std::vector<double> weights;
    double sigma;
};

struct PosteriorDraws {
    std::vector<Snapshot> draws;
};

//! Draw from the full conditional of the normal-scale variance W given the
//! noise residual r under the Laplace layer: p(w) ~ w^{-1/2}
//! exp(-r^2/(2w) - w/2), i.e. 1/W is inverse-Gaussian(1/|r|, 1).
//! r = 0 falls back to the prior Exp(1/2).
double augment_laplace(double y_residual, Rng& rng);

//! Same conditional when the Laplace layer has rate v (W ~ Exp(v^2/2) a
//! priori): 1/W ~ inverse-Gaussian(v/|r|, v^2).
double augment_laplace_rate(double y_residual, double v, Rng& rng);

DPMState initial_state(std::span<const double> y, const DPMConfig& config, Rng& rng);

//! One full Gibbs pass: noise augmentation, auxiliary-atom assignments,
//! random-walk location updates, log-scale sigma update. Leaves the joint
//! posterior invariant; adapts step sizes only when `adapt` is set.
void gibbs_sweep(DPMState& state, std::span<const double> y, const DPMConfig& config,
                 GibbsScales& scales, bool adapt, Rng& rng);

//! Full chain: (iters - burn)/thin snapshots, deterministic given the seed.
PosteriorDraws run_chain(std::span<const double> y, const DPMConfig& config);

//! One draw of (mu_H, sigma) from the prior (stick-breaking, truncated at
//! remaining mass 1e-10); used for prior-predictive baselines.
Snapshot sample_prior(const DPMConfig& config, Rng& rng);

//! W1(mu_X, mu0X) per snapshot, mu_X = GaussMix(atoms, weights, sigma).
std::vector<double> posterior_w1(const PosteriorDraws& draws, const ProbabilityMeasure& mu0X);

//! ||f_Y - f_0Y||_1 per snapshot with f_Y = f_eps * (mu_H * phi_sigma)
//! realized on the grid of f0Y.
std::vector<double> posterior_predictive_l1(const PosteriorDraws& draws, const NoiseModel& noise,
                                            const GridFunction& f0Y);

//! JSON-lines snapshot serialization: {"sigma":..,"atoms":[..],"weights":[..]}.
void write_snapshots_jsonl(const PosteriorDraws& draws, std::ostream& os);

}  // namespace wdecon
