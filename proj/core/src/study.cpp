#include "wdecon/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "wdecon/approx.hpp"
#include "wdecon/distributions.hpp"
#include "wdecon/dpm.hpp"
#include "wdecon/inversion.hpp"
#include "wdecon/kernels.hpp"
#include "wdecon/numerics.hpp"
#include "wdecon/wasserstein.hpp"

namespace wdecon {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty vector");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

//! Two-sided 97.5% Student t quantiles by degrees of freedom.
double t975(std::size_t df) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                   2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                   2.131,  2.120, 2.110, 2.101, 2.093, 2.086};
    if (df == 0) return 12.706;
    if (df <= 20) return table[df - 1];
    if (df <= 30) return 2.042 + (2.086 - 2.042) * static_cast<double>(30 - df) / 10.0;
    return 1.96 + 2.5 / static_cast<double>(df);
}

std::uint64_t derived_seed(std::uint64_t master, std::uint64_t idx) {
    Rng r = Rng::stream(master, idx);
    return r.next_u64();
}

void run_cells(std::size_t cells, const std::function<void(std::size_t)>& work) {
    const std::size_t workers = worker_count(cells);
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells) return;
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

void write_manifest(const StudyConfig& cfg, const fs::path& dir) {
    json m;
    m["tool"] = "wdecon";
    m["version"] = "0.1.0";
    for (const auto& [k, v] : cfg.as_map()) m["config"][k] = v;
    std::ofstream os(dir / "manifest.json");
    os << m.dump(2) << "\n";
}

void write_summary(const json& summary, const fs::path& dir) {
    std::ofstream os(dir / "summary.json");
    os << summary.dump(2) << "\n";
}

GridSpec study_grid(const StudyConfig& cfg, std::size_t default_n) {
    return GridSpec{cfg.domain_lo, cfg.domain_hi, cfg.grid_n ? cfg.grid_n : default_n};
}

// ---------------------------------------------------------------- simulate

int study_simulate(const StudyConfig& cfg, const fs::path& dir) {
    if (cfg.n_schedule.empty()) throw std::invalid_argument("simulate: --n required");
    const auto n = static_cast<std::size_t>(cfg.n_schedule.front());
    SignalPreset preset = SignalPreset::get(cfg.preset);
    NoiseModel noise = NoiseModel::parse(cfg.noise);
    ModelSample sample = simulate(preset, noise, n, cfg.seed);

    std::ofstream os(dir / "sample.csv");
    os << "index,y,x,eps\n";
    for (std::size_t i = 0; i < n; ++i)
        os << i << "," << fmt(sample.y[i]) << "," << fmt(sample.x[i]) << ","
           << fmt(sample.eps[i]) << "\n";

    json summary;
    summary["study"] = "simulate";
    summary["n"] = n;
    summary["seed"] = cfg.seed;
    summary["pass"] = true;
    write_summary(summary, dir);
    return 0;
}

// ---------------------------------------------------------------- op-norms

int study_op_norms(const StudyConfig& cfg, const fs::path& dir) {
    NoiseModel noise = NoiseModel::parse(cfg.noise);
    std::vector<double> hs = cfg.h_schedule;
    if (hs.empty())
        for (int k = 4; k <= 10; ++k) hs.push_back(std::pow(2.0, -k));
    // the finest bandwidths put kernel oscillations at the 2^16 grid scale
    const GridSpec spec = study_grid(cfg, 1 << 18);

    auto rows = operator_norms(noise, hs, spec);
    {
        std::ofstream os(dir / "op_norms.csv");
        os << "h,k1_l1,k2_l1,f2_l1\n";
        for (const auto& r : rows)
            os << fmt(r.h) << "," << fmt(r.k1_l1) << "," << fmt(r.k2_l1) << ","
               << fmt(r.f2_l1) << "\n";
    }

    // divide out the |log h| factor, then fit against 1/h
    std::vector<double> invh, k2c, f2c, k1s;
    for (const auto& r : rows) {
        const double lg = std::abs(std::log(r.h));
        invh.push_back(1.0 / r.h);
        k2c.push_back(r.k2_l1 / lg);
        f2c.push_back(r.f2_l1 / lg);
        k1s.push_back(r.k1_l1);
    }
    LogLogFit k2fit = fit_loglog(invh, k2c);
    LogLogFit f2fit = fit_loglog(invh, f2c);
    const double k1_ratio = *std::max_element(k1s.begin(), k1s.end()) /
                            *std::min_element(k1s.begin(), k1s.end());

    const double beta = noise.beta();
    const double k2_target = std::max(beta - 0.5, 0.0);
    const double f2_target = std::max(beta - 1.0, 0.0);

    json summary;
    summary["study"] = "op-norms";
    summary["noise"] = noise.name();
    summary["k2_slope"] = k2fit.slope;
    summary["k2_target"] = k2_target;
    summary["k2_r2"] = k2fit.r2;
    summary["f2_slope"] = f2fit.slope;
    summary["f2_target"] = f2_target;
    summary["f2_r2"] = f2fit.r2;
    summary["k1_max_min_ratio"] = k1_ratio;
    json failures = json::array();
    if (std::abs(k2fit.slope - k2_target) > 0.25) failures.push_back("k2_slope");
    if (std::abs(f2fit.slope - f2_target) > 0.25) failures.push_back("f2_slope");
    if (k1_ratio > 3.0) failures.push_back("k1_max_min_ratio");
    summary["failures"] = failures;
    summary["pass"] = failures.empty();
    write_summary(summary, dir);
    return failures.empty() ? 0 : 1;
}

// -------------------------------------------------------------------- bias

int study_bias(const StudyConfig& cfg, const fs::path& dir) {
    const GridSpec spec = study_grid(cfg, 1 << 14);
    std::ofstream os(dir / "bias.csv");
    os << "case,h,bias\n";

    // Laplace-signal CDF: slope expected near alpha + 1 with alpha just below 1
    std::vector<double> hs_lap, bias_lap;
    {
        SignalPreset preset = SignalPreset::get("laplace-signal", spec.lo, spec.hi, spec.n);
        for (int k = 3; k <= 7; ++k) {
            const double h = std::pow(2.0, -k);
            const double b = cdf_bias(preset.cdf, h, spec);
            hs_lap.push_back(1.0 / h);
            bias_lap.push_back(b);
            os << "laplace-signal," << fmt(h) << "," << fmt(b) << "\n";
        }
    }
    LogLogFit lap_fit = fit_loglog(hs_lap, bias_lap);
    const double lap_slope = -lap_fit.slope;  // decay exponent in h

    // Gaussian CDF: superpolynomial decay. The spectrum beyond 1/h drives
    // the bias, ~e^{-1/(2h^2)}, which leaves double range below h ~ 2^-3;
    // the fit therefore runs over representable h in [2^-2.5, 2^-1].
    std::vector<double> hs_gauss, bias_gauss;
    {
        auto fhat = [](double t) { return std::complex<double>(std::exp(-0.5 * t * t), 0.0); };
        for (double e = 1.0; e <= 2.5 + 1e-9; e += 0.5) {
            const double h = std::pow(2.0, -e);
            const double b = cdf_bias_spectral(fhat, h, spec);
            hs_gauss.push_back(1.0 / h);
            bias_gauss.push_back(b);
            os << "gauss," << fmt(h) << "," << fmt(b) << "\n";
        }
    }
    LogLogFit gauss_fit = fit_loglog(hs_gauss, bias_gauss);
    const double gauss_slope = -gauss_fit.slope;

    // Gaussian-mixture bias uniformity over random mixing measures
    double gmix_min = 0.0, gmix_max = 0.0;
    {
        Rng rng(cfg.seed);
        const double h = std::pow(2.0, -6);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> atoms(5), weights(5);
            double wsum = 0.0;
            for (int i = 0; i < 5; ++i) {
                atoms[static_cast<std::size_t>(i)] = rng.uniform(-2.0, 2.0);
                weights[static_cast<std::size_t>(i)] = rng.uniform();
                wsum += weights[static_cast<std::size_t>(i)];
            }
            for (auto& w : weights) w /= wsum;
            // tidy the normalization for the measure invariant
            weights[4] += 1.0 - std::accumulate(weights.begin(), weights.end(), 0.0);
            const double b = gaussmix_bias_check(
                ProbabilityMeasure::discrete(atoms, weights), h, 1.0, spec);
            os << "gmix," << fmt(h) << "," << fmt(b) << "\n";
            if (rep == 0) gmix_min = gmix_max = b;
            gmix_min = std::min(gmix_min, b);
            gmix_max = std::max(gmix_max, b);
        }
    }
    const double gmix_ratio = gmix_max / gmix_min;

    json summary;
    summary["study"] = "bias";
    summary["laplace_signal_slope"] = lap_slope;
    summary["gauss_slope"] = gauss_slope;
    summary["gmix_uniformity_ratio"] = gmix_ratio;
    json failures = json::array();
    if (lap_slope < 1.7 || lap_slope > 2.1) failures.push_back("laplace_signal_slope");
    if (gauss_slope < 4.0) failures.push_back("gauss_slope");
    if (gmix_ratio > 2.0) failures.push_back("gmix_uniformity_ratio");
    summary["failures"] = failures;
    summary["pass"] = failures.empty();
    write_summary(summary, dir);
    return failures.empty() ? 0 : 1;
}

// --------------------------------------------------------------- inversion

}  // namespace

std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> inversion_suite(
    const GridSpec& spec) {
    SignalPreset gmix = SignalPreset::get("gmix2", spec.lo, spec.hi, spec.n);
    SignalPreset lap = SignalPreset::get("laplace-signal", spec.lo, spec.hi, spec.n);
    auto gmix_density = [&] { return ProbabilityMeasure::grid_density(gmix.density); };

    std::vector<std::pair<ProbabilityMeasure, ProbabilityMeasure>> pairs;
    // identical pair: every component must degenerate to zero
    pairs.emplace_back(gmix_density(), gmix_density());
    // shift family
    for (double c : {0.05, 0.1, 0.2})
        pairs.emplace_back(gmix_density().translated(c), gmix_density());
    // weight perturbation on the mixture representation
    pairs.emplace_back(ProbabilityMeasure::gauss_mix({-1.0, 1.0}, {0.45, 0.55}, 0.5),
                       ProbabilityMeasure::gauss_mix({-1.0, 1.0}, {0.5, 0.5}, 0.5));
    // very different smooth laws
    pairs.emplace_back(ProbabilityMeasure::grid_density(lap.density), gmix_density());
    // atomic pair: the no-smoothness branch
    pairs.emplace_back(ProbabilityMeasure::discrete({-1.0, 1.0}, {0.3, 0.7}),
                       ProbabilityMeasure::discrete({-1.0, 1.0}, {0.5, 0.5}));
    // adversarial high-frequency wiggle at scale 1/h_min
    {
        std::vector<double> vals(gmix.density.values());
        for (std::size_t k = 0; k < vals.size(); ++k)
            vals[k] *= 1.0 + 0.3 * std::sin(64.0 * gmix.density.x(k));
        GridFunction wig(spec.lo, spec.hi, std::move(vals));
        const double mass = norms(wig).l1;
        std::vector<double> renorm(wig.values());
        for (auto& v : renorm) v /= mass;
        pairs.emplace_back(
            ProbabilityMeasure::grid_density(GridFunction(spec.lo, spec.hi, renorm)),
            gmix_density());
    }
    return pairs;
}

namespace {

int study_inversion(const StudyConfig& cfg, const fs::path& dir) {
    const GridSpec spec = study_grid(cfg, 1 << 14);
    NoiseModel noise = NoiseModel::parse(cfg.noise);
    std::vector<double> hs = cfg.h_schedule;
    if (hs.empty())
        for (int k = 2; k <= 7; ++k) hs.push_back(std::pow(2.0, -k));

    auto pairs = inversion_suite(spec);
    std::vector<std::optional<double>> alphas(pairs.size(), std::nullopt);
    VerifySummary vs = verify_inequality(pairs, noise, hs, alphas, spec, 4);

    std::ofstream os(dir / "inversion.csv");
    os << "pair_id,h,w1_actual,t1,t2_w1,t2_tv,bound_tv,slack\n";
    for (std::size_t i = 0; i < vs.reports.size(); ++i) {
        const auto& r = vs.reports[i];
        os << i << "," << fmt(r.h) << "," << fmt(r.w1_actual) << "," << fmt(r.t1) << ","
           << fmt(r.t2_w1) << "," << fmt(r.t2_tv) << "," << fmt(r.bound_tv) << ","
           << fmt(r.slack) << "\n";
    }

    json summary;
    summary["study"] = "inversion";
    summary["noise"] = noise.name();
    summary["fitted_constant"] = vs.fitted_constant;
    summary["worst_slack"] = vs.worst_slack;
    json failures = json::array();
    if (!vs.pass) failures.push_back("worst_slack");
    summary["failures"] = failures;
    summary["pass"] = vs.pass;
    write_summary(summary, dir);
    return vs.pass ? 0 : 1;
}

// ------------------------------------------------------------------ approx

int study_approx(const StudyConfig& cfg, const fs::path& dir) {
    NoiseModel noise = NoiseModel::parse(cfg.noise);
    std::vector<double> sigmas = cfg.sigma_schedule;
    if (sigmas.empty()) sigmas = {0.4, 0.2, 0.1, 0.05};
    const double a = 1.0;
    SignalPreset preset = SignalPreset::get(cfg.preset == "gmix2" ? "smoothed-uniform"
                                                                  : cfg.preset);
    GridFunction f_trunc = truncate_renormalize(preset.density, a);

    struct Row {
        double sigma;
        int J;
        std::size_t n_atoms;
        double gap;
        double residual;
    };
    std::vector<Row> rows(sigmas.size());
    run_cells(sigmas.size(), [&](std::size_t i) {
        const double sigma = sigmas[i];
        const int J = moment_budget(a, sigma);
        MomentSpec mspec{a, J, J + 3};
        MomentMatch match = match_moments(f_trunc, mspec);
        const auto& disc = std::get<ProbabilityMeasure::Discrete>(match.measure.repr());
        const double gap = hellinger_gap(match.measure, sigma, f_trunc, noise);
        rows[i] = Row{sigma, J, disc.atoms.size(), gap, match.residual_max};
    });

    std::ofstream os(dir / "approx.csv");
    os << "sigma,J,n_atoms,hellinger_gap,residual_max\n";
    std::vector<double> xs, ys;
    double worst_res = 0.0;
    for (const auto& r : rows) {
        os << fmt(r.sigma) << "," << r.J << "," << r.n_atoms << "," << fmt(r.gap) << ","
           << fmt(r.residual) << "\n";
        xs.push_back(r.sigma);
        ys.push_back(r.gap);
        worst_res = std::max(worst_res, r.residual);
    }
    LogLogFit fit = fit_loglog(xs, ys);

    const double beta = noise.beta();
    json summary;
    summary["study"] = "approx";
    summary["noise"] = noise.name();
    summary["gap_slope"] = fit.slope;
    summary["slope_floor"] = beta - 0.3;
    summary["worst_residual"] = worst_res;
    json failures = json::array();
    if (fit.slope < beta - 0.3) failures.push_back("gap_slope");
    if (worst_res > 1e-9) failures.push_back("worst_residual");
    summary["failures"] = failures;
    summary["pass"] = failures.empty();
    write_summary(summary, dir);
    return failures.empty() ? 0 : 1;
}

// --------------------------------------------------------------- dpm-rates

int study_dpm_rates(const StudyConfig& cfg, const fs::path& dir) {
    NoiseModel noise = NoiseModel::parse(cfg.noise);
    std::vector<double> ns = cfg.n_schedule;
    if (ns.empty()) ns = {250.0, 1000.0, 4000.0};
    const std::size_t reps = cfg.replications;

    const GridSpec spec{-40.0, 40.0, 1 << 13};
    SignalPreset preset = SignalPreset::get(cfg.preset, spec.lo, spec.hi, spec.n);
    ProbabilityMeasure mu0 = ProbabilityMeasure::grid_density(preset.density);
    GridFunction f0y = mixed_density(mu0, noise, spec);

    struct Cell {
        double n;
        std::size_t rep;
        double median_w1;
        double median_l1;
        double mean_sigma;
        double mean_clusters;
    };
    const std::size_t cells_count = ns.size() * reps;
    std::vector<Cell> cells(cells_count);

    run_cells(cells_count, [&](std::size_t idx) {
        const std::size_t ni = idx / reps;
        const std::size_t rep = idx % reps;
        const auto n = static_cast<std::size_t>(ns[ni]);

        DPMConfig dcfg;
        dcfg.noise = noise;
        dcfg.iters = 3000;
        dcfg.burn = 1500;
        dcfg.thin = 5;
        dcfg.seed = derived_seed(cfg.seed, idx);
        ModelSample sample = simulate(preset, noise, n, derived_seed(cfg.seed, 1000 + idx));
        PosteriorDraws draws = run_chain(sample.y, dcfg);

        std::vector<double> w1s = posterior_w1(draws, mu0);
        std::vector<double> l1s = posterior_predictive_l1(draws, noise, f0y);
        std::vector<double> sig, ncl;
        for (const auto& s : draws.draws) {
            sig.push_back(s.sigma);
            ncl.push_back(static_cast<double>(s.atoms.size()));
        }
        cells[idx] = Cell{static_cast<double>(n), rep,      median(w1s), median(l1s),
                          mean(sig),              mean(ncl)};

        const std::string stem = "chain_n" + std::to_string(n) + "_r" + std::to_string(rep);
        std::ofstream chain_csv(dir / (stem + ".csv"));
        chain_csv << "draw_index,w1,l1,sigma,n_clusters\n";
        for (std::size_t k = 0; k < w1s.size(); ++k)
            chain_csv << k << "," << fmt(w1s[k]) << "," << fmt(l1s[k]) << ","
                      << fmt(draws.draws[k].sigma) << "," << draws.draws[k].atoms.size() << "\n";
        std::ofstream chain_jsonl(dir / (stem + ".jsonl"));
        write_snapshots_jsonl(draws, chain_jsonl);
    });

    std::ofstream os(dir / "dpm_rates.csv");
    os << "n,rep,median_w1,median_l1,mean_sigma,mean_clusters\n";
    for (const auto& c : cells)
        os << c.n << "," << c.rep << "," << fmt(c.median_w1) << "," << fmt(c.median_l1) << ","
           << fmt(c.mean_sigma) << "," << fmt(c.mean_clusters) << "\n";

    // medians over replications, then log-log slope against n
    std::vector<double> med_w1(ns.size()), med_l1(ns.size());
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        std::vector<double> w1s, l1s;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            w1s.push_back(cells[ni * reps + rep].median_w1);
            l1s.push_back(cells[ni * reps + rep].median_l1);
        }
        med_w1[ni] = median(w1s);
        med_l1[ni] = median(l1s);
    }
    bool w1_decreasing = true, l1_decreasing = true;
    for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni) {
        if (!(med_w1[ni + 1] < med_w1[ni])) w1_decreasing = false;
        if (!(med_l1[ni + 1] < med_l1[ni])) l1_decreasing = false;
    }
    // slope fits need >= 4 points; with 3 n-values fall back to the
    // two-endpoint slope, which the wide acceptance bands absorb
    auto slope_of = [&](const std::vector<double>& ys) {
        if (ns.size() >= 4) return fit_loglog(ns, ys).slope;
        return (std::log(ys.back()) - std::log(ys.front())) /
               (std::log(ns.back()) - std::log(ns.front()));
    };
    const double l1_slope = slope_of(med_l1);
    const double w1_slope = slope_of(med_w1);

    const double beta = noise.beta();
    json summary;
    summary["study"] = "dpm-rates";
    summary["noise"] = noise.name();
    summary["preset"] = cfg.preset;
    summary["median_l1_by_n"] = med_l1;
    summary["median_w1_by_n"] = med_w1;
    summary["l1_slope"] = l1_slope;
    summary["l1_target"] = -beta / (2.0 * beta + 1.0);
    summary["w1_slope"] = w1_slope;
    summary["w1_target"] = -1.0 / (2.0 * beta + 1.0);
    json failures = json::array();
    if (!l1_decreasing) failures.push_back("l1_monotone");
    if (!w1_decreasing) failures.push_back("w1_monotone");
    if (l1_slope < -0.55 || l1_slope > -0.25) failures.push_back("l1_slope");
    if (w1_slope < -0.35 || w1_slope > -0.08) failures.push_back("w1_slope");
    summary["failures"] = failures;
    summary["pass"] = failures.empty();
    write_summary(summary, dir);
    return failures.empty() ? 0 : 1;
}

}  // namespace

LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 4)
        throw std::invalid_argument("fit_loglog: need at least 4 points");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_loglog: inputs must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    const double mx = mean(lx), my = mean(ly);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_loglog: degenerate x values");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        sse += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    const double se = std::sqrt(std::max(sse, 0.0) / static_cast<double>(n - 2) / sxx);
    fit.ci95 = t975(n - 2) * se;
    return fit;
}

std::vector<double> parse_schedule(const std::string& text) {
    auto parse_number = [](const std::string& tok) -> double {
        const auto caret = tok.find('^');
        if (caret != std::string::npos) {
            const double base = std::stod(tok.substr(0, caret));
            const double expo = std::stod(tok.substr(caret + 1));
            return std::pow(base, expo);
        }
        return std::stod(tok);
    };
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const double from = parse_number(text.substr(0, dots));
        const double to = parse_number(text.substr(dots + 2));
        if (!(from > 0.0) || !(to > 0.0))
            throw std::invalid_argument("schedule range must be positive");
        std::vector<double> out;
        // dyadic walk from `from` toward `to`
        const bool down = to < from;
        for (double v = from; down ? v >= to * (1.0 - 1e-12) : v <= to * (1.0 + 1e-12);
             v = down ? v / 2.0 : v * 2.0)
            out.push_back(v);
        return out;
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_number(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty schedule: " + text);
    return out;
}

StudyConfig StudyConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    StudyConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: " + line);
        cfg.apply(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

void StudyConfig::apply(const std::string& key, const std::string& value) {
    if (key == "study") study = value;
    else if (key == "noise") noise = value;
    else if (key == "preset") preset = value;
    else if (key == "h") h_schedule = parse_schedule(value);
    else if (key == "sigma") sigma_schedule = parse_schedule(value);
    else if (key == "n") n_schedule = parse_schedule(value);
    else if (key == "reps") replications = static_cast<std::size_t>(std::stoull(value));
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "out") out_dir = value;
    else if (key == "grid_n") grid_n = static_cast<std::size_t>(std::stoull(value));
    else if (key == "domain") {
        const auto colon = value.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("domain must be lo:hi");
        domain_lo = std::stod(value.substr(0, colon));
        domain_hi = std::stod(value.substr(colon + 1));
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

std::map<std::string, std::string> StudyConfig::as_map() const {
    auto join = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
        return s;
    };
    std::map<std::string, std::string> m;
    m["study"] = study;
    m["noise"] = noise;
    m["preset"] = preset;
    m["h"] = join(h_schedule);
    m["sigma"] = join(sigma_schedule);
    m["n"] = join(n_schedule);
    m["reps"] = std::to_string(replications);
    m["seed"] = std::to_string(seed);
    m["out"] = out_dir;
    m["grid_n"] = std::to_string(grid_n);
    m["domain"] = fmt(domain_lo) + ":" + fmt(domain_hi);
    return m;
}

std::size_t worker_count(std::size_t cells) {
    std::size_t cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("WDECON_THREADS")) {
        const auto parsed = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
        if (parsed > 0) cap = std::min(cap, parsed);
    }
    return std::max<std::size_t>(1, std::min(cap, cells));
}

int run_study(const StudyConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_manifest(cfg, dir);
    if (cfg.study == "simulate") return study_simulate(cfg, dir);
    if (cfg.study == "op-norms") return study_op_norms(cfg, dir);
    if (cfg.study == "bias") return study_bias(cfg, dir);
    if (cfg.study == "inversion") return study_inversion(cfg, dir);
    if (cfg.study == "approx") return study_approx(cfg, dir);
    if (cfg.study == "dpm-rates") return study_dpm_rates(cfg, dir);
    throw std::invalid_argument("unknown study: " + cfg.study);
}

}  // namespace wdecon
