#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wdecon/numerics.hpp"
#include "wdecon/wasserstein.hpp"

namespace wdecon {

//! Ordinary least squares on (log x, log y) with a t-based 95% interval on
//! the slope. Inputs must be positive, at least 4 points.
struct LogLogFit {
    double slope;
    double intercept;
    double r2;
    double ci95;  // half-width of the 95% interval on the slope
};

LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

//! Parse a schedule token: "2^-4..2^-10" (dyadic range), a comma list
//! ("250,1000,4000" or "0.4,0.2,0.1"), or a single value; "2^k" powers are
//! accepted anywhere a number is.
std::vector<double> parse_schedule(const std::string& text);

//! Flat key=value study configuration with CLI-flag overrides.
struct StudyConfig {
    std::string study;           // simulate | op-norms | bias | inversion | approx | dpm-rates
    std::string noise = "laplace";
    std::string preset = "gmix2";
    std::vector<double> h_schedule;
    std::vector<double> sigma_schedule;
    std::vector<double> n_schedule;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "runs/out";
    std::size_t grid_n = 0;      // 0 = study default
    double domain_lo = -40.0;
    double domain_hi = 40.0;

    static StudyConfig from_file(const std::string& path);
    void apply(const std::string& key, const std::string& value);
    std::map<std::string, std::string> as_map() const;
};

//! Dispatch a study, write manifest.json, data CSVs and summary.json into
//! the output directory. Returns 0 when every assertion for the study
//! holds, 1 when a metric fails (the summary names it), throws
//! std::invalid_argument for unusable configs.
int run_study(const StudyConfig& config);

//! Worker-pool width: min(WDECON_THREADS, hardware, cells).
std::size_t worker_count(std::size_t cells);

//! The fixed eight-pair measure suite the inversion study and the
//! acceptance gate share.
std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> inversion_suite(
    const GridSpec& spec);

}  // namespace wdecon
