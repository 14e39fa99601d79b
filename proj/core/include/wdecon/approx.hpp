#pragma once

#include <vector>

#include "wdecon/distributions.hpp"
#include "wdecon/numerics.hpp"
#include "wdecon/wasserstein.hpp"

namespace wdecon {

//! Moment-matching request: polynomial moments of orders 0..J-1 and the
//! two exponential moments at b = +-1/2, on support [-a, a], with an atom
//! budget driving the candidate grid size.
struct MomentSpec {
    double a;
    int J;
    int n_target;
};

//! Restriction of a density to [-a, a], renormalized to mass 1 (1e-10).
//! Rejects when less than half the mass is captured.
GridFunction truncate_renormalize(const GridFunction& f0x, double a);

struct MomentTargets {
    std::vector<double> values;  // Chebyshev moments T_0..T_{J-1}, then e^{u/2}, e^{-u/2}
};

//! Exact moments of the piecewise-linear grid density (closed-form segment
//! integrals, no quadrature error).
MomentTargets moment_targets(const GridFunction& f_trunc, const MomentSpec& spec);

struct MomentMatch {
    ProbabilityMeasure measure;
    double residual_max;  // worst moment-equality residual
};

//! Discrete probability measure on [-a, a] matching the J polynomial and
//! two exponential moments of f_trunc to 1e-9, with at most J+3 atoms.
//! Solved as a phase-1 simplex over a candidate-atom grid; infeasibility
//! at the requested tolerance is reported with the worst residual.
MomentMatch match_moments(const GridFunction& f_trunc, const MomentSpec& spec);

//! Hellinger distance between f_eps * (muH * phi_sigma) and f_eps * f0X.
double hellinger_gap(const ProbabilityMeasure& muH, double sigma, const GridFunction& f0X,
                     const NoiseModel& noise);

//! The sigma-to-J coupling of the approximation scheme: J(sigma) = ceil(eta e (a/sigma)
//! sqrt(|log sigma|)) with eta = 1.1.
int moment_budget(double a, double sigma, double eta = 1.1);

}  // namespace wdecon
