#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "wdecon/numerics.hpp"

namespace wdecon {

//! One-dimensional probability measure in one of four representations.
//!
//! Empirical(sorted sample), Discrete(atoms, weights), GridDensity and
//! GaussMix(atoms, weights, common sd). Immutable; safe to share across
//! threads.
class ProbabilityMeasure {
public:
    struct Empirical {
        std::vector<double> sample;  // sorted ascending
    };
    struct Discrete {
        std::vector<double> atoms;   // sorted ascending
        std::vector<double> weights; // nonnegative, sum 1
    };
    struct GridDensity {
        std::shared_ptr<const GridFunction> density;
        std::shared_ptr<const GridFunction> cdf;
    };
    struct GaussMix {
        std::vector<double> atoms;
        std::vector<double> weights;
        double sigma;
    };

    static ProbabilityMeasure empirical(std::vector<double> sample);
    static ProbabilityMeasure discrete(std::vector<double> atoms, std::vector<double> weights);
    static ProbabilityMeasure dirac(double atom) { return discrete({atom}, {1.0}); }
    static ProbabilityMeasure grid_density(GridFunction density);
    static ProbabilityMeasure gauss_mix(std::vector<double> atoms, std::vector<double> weights,
                                        double sigma);

    //! Right-continuous CDF P(X <= x).
    double cdf(double x) const;
    //! Left limit P(X < x); differs from cdf only at atoms.
    double cdf_left(double x) const;

    //! True for the step-function representations (Empirical, Discrete).
    bool is_step() const;
    //! Support bounds used to size integration windows (GaussMix padded by
    //! 10 component sd's, grids by their domain).
    double support_lo() const;
    double support_hi() const;
    //! Breakpoints of a step CDF (atoms / sample points).
    std::vector<double> breakpoints() const;

    //! Same measure translated by c.
    ProbabilityMeasure translated(double c) const;

    const std::variant<Empirical, Discrete, GridDensity, GaussMix>& repr() const { return repr_; }

private:
    explicit ProbabilityMeasure(std::variant<Empirical, Discrete, GridDensity, GaussMix> r)
        : repr_(std::move(r)) {}
    std::variant<Empirical, Discrete, GridDensity, GaussMix> repr_;
};

//! Exact L1-Wasserstein distance W1(mu, nu) = int |F_mu - F_nu|.
//!
//! Equal-size empirical pairs use the sorted-sample formula, pairs of step
//! CDFs are integrated exactly, and all other pairs go through CDFs on a
//! merged refinement grid covering both supports.
double w1(const ProbabilityMeasure& mu, const ProbabilityMeasure& nu);

//! DKW-type W1 concentration threshold sqrt(log(2/delta) / (2n)).
double dkw_threshold(std::size_t n, double delta);

struct DkwResult {
    double statistic;
    double threshold;
    bool reject;
};

//! Test based on P(W1(mu_n, mu0) > t) <= 2 exp(-2 n t^2): rejects when the
//! empirical measure of the sample is W1-far from mu0.
DkwResult dkw_test(const std::vector<double>& sample, const ProbabilityMeasure& mu0,
                   double delta);

}  // namespace wdecon
