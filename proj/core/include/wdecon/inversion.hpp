#pragma once

#include <optional>
#include <vector>

#include "wdecon/distributions.hpp"
#include "wdecon/kernels.hpp"
#include "wdecon/numerics.hpp"
#include "wdecon/wasserstein.hpp"

namespace wdecon {

//! One evaluation of the smoothing inequality
//!   W1(muX, mu0X) <~ bias(h) + T1 + T2
//! with T1 = ||k1h * (F_Y - F_0Y)||_1 and T2 in both computable variants:
//! the W1 branch ||k2h * (F_Y - F_0Y)||_1 and the TV branch
//! ||f2h * (f_Y - f_0Y)||_1. Bounds here carry constant 1; calibration is
//! applied by verify_inequality.
struct InversionReport {
    double h = 0.0;
    double w1_actual = 0.0;
    double bias_term = 0.0;  // h, or h^{alpha+1} when a certified alpha is given
    double t1 = 0.0;
    double t2_w1 = 0.0;
    double t2_tv = 0.0;
    double bound_w1 = 0.0;
    double bound_tv = 0.0;
    double slack = 0.0;  // bound_tv / w1_actual
};

//! Mixed observation density f_Y = f_eps * muX realized on the window.
GridFunction mixed_density(const ProbabilityMeasure& muX, const NoiseModel& noise,
                           const GridSpec& spec);

InversionReport inversion_components(const ProbabilityMeasure& muX,
                                     const ProbabilityMeasure& mu0X, const NoiseModel& noise,
                                     double h, std::optional<double> alpha,
                                     const GridSpec& spec);

//! Report minimizing bound_tv over a nonempty h grid in (0, 1/2].
InversionReport optimize_h(const ProbabilityMeasure& muX, const ProbabilityMeasure& mu0X,
                           const NoiseModel& noise, const std::vector<double>& h_grid,
                           std::optional<double> alpha, const GridSpec& spec);

struct RateExponents {
    double direct_to_w1;        // (alpha+1)/(alpha+(beta v 1)), or 1/(beta v 1)
    double w1_rate_from_root_n; // (alpha+1)/(2 alpha + (2 beta v 1) + 1)
};

RateExponents rate_exponents(std::optional<double> alpha, double beta);

struct VerifySummary {
    bool pass = false;
    double worst_slack = 0.0;
    double fitted_constant = 0.0;
    std::vector<InversionReport> reports;  // one per pair, at its optimal h
};

//! Check the inequality on >= 5 test pairs: a single constant C is fitted
//! as the max ratio actual/bound over the first `calibration_count` pairs,
//! then every pair must satisfy actual <= C * bound at its optimal h.
VerifySummary verify_inequality(
    const std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>>& pairs,
    const NoiseModel& noise, const std::vector<double>& h_grid,
    const std::vector<std::optional<double>>& alphas, const GridSpec& spec,
    std::size_t calibration_count);

}  // namespace wdecon
