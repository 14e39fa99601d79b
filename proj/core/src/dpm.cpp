#include "wdecon/dpm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace wdecon {

namespace {

constexpr double kPi = std::numbers::pi;

void check_config(const DPMConfig& c, std::size_t n) {
    if (n == 0) throw std::invalid_argument("dpm: data must be nonempty");
    if (c.noise.kind() == NoiseKind::Linnik) {
        if (!(c.noise.beta() > 1.0) || !(c.noise.beta() < 2.0))
            throw std::invalid_argument("dpm: Linnik noise requires beta in (1, 2)");
    } else if (c.noise.kind() != NoiseKind::Laplace) {
        throw std::invalid_argument("dpm: sampler supports Laplace or Linnik noise only");
    }
    if (!(c.base_delta > 0.0) || c.base_delta > 1.0)
        throw std::invalid_argument("dpm: base delta must lie in (0, 1]");
    if (!(c.sigma_nu > 0.0) || !(c.sigma_gamma > 0.0))
        throw std::invalid_argument("dpm: inverse-gamma parameters must be positive");
    if (c.aux_m < 1) throw std::invalid_argument("dpm: aux_m must be >= 1");
    if (c.iters <= c.burn) throw std::invalid_argument("dpm: iters must exceed burn");
    if (c.thin == 0) throw std::invalid_argument("dpm: thin must be >= 1");
}

double sample_base(const DPMConfig& c, Rng& rng) {
    // |U|^delta ~ Gamma(1/delta, rate b0), sign uniform
    const double g = rng.gamma(1.0 / c.base_delta) / c.base_b0;
    const double mag = std::pow(g, 1.0 / c.base_delta);
    return (rng.next_u64() & 1u) ? mag : -mag;
}

double log_base_density(const DPMConfig& c, double u) {
    return -c.base_b0 * std::pow(std::abs(u), c.base_delta);
}

//! log N(y; u, var) without the 2*pi constant.
double log_norm(double y, double u, double var) {
    const double d = y - u;
    return -0.5 * std::log(var) - 0.5 * d * d / var;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("gibbs sweep aborted: non-finite ") + what);
}

void check_sigma(double sigma) {
    // the lower edge keeps sigma^2 representable
    if (!(sigma > 1e-150) || !(sigma < 1e150) || !std::isfinite(sigma))
        throw std::runtime_error("gibbs sweep aborted: sigma left its support");
}

}  // namespace

double augment_laplace(double y_residual, Rng& rng) {
    return augment_laplace_rate(y_residual, 1.0, rng);
}

double augment_laplace_rate(double y_residual, double v, Rng& rng) {
    const double r = std::abs(y_residual);
    if (r == 0.0) return rng.exponential(0.5 * v * v);
    const double inv_w = rng.inverse_gaussian(v / r, v * v);
    return 1.0 / inv_w;
}

DPMState initial_state(std::span<const double> y, const DPMConfig& config, Rng& rng) {
    check_config(config, y.size());
    (void)rng;
    DPMState s;
    const std::size_t n = y.size();
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    s.z.assign(n, 0);
    s.clusters = {Cluster{sorted[n / 2], static_cast<int>(n)}};
    s.sigma = 1.0;
    s.w_aug.assign(n, 2.0);  // prior mean of Exp(1/2)
    if (config.noise.kind() == NoiseKind::Linnik) s.v_aug.assign(n, 1.0);
    return s;
}

void gibbs_sweep(DPMState& state, std::span<const double> y, const DPMConfig& config,
                 GibbsScales& scales, bool adapt, Rng& rng) {
    const std::size_t n = y.size();
    check_config(config, n);
    const bool linnik = config.noise.kind() == NoiseKind::Linnik;
    const double beta = config.noise.beta();
    const double sig2 = state.sigma * state.sigma;

    // (1) noise augmentation: draw the latent signal value x_i, then the
    // scale variables from their conditionals given the residual y_i - x_i
    for (std::size_t i = 0; i < n; ++i) {
        const double u = state.clusters[static_cast<std::size_t>(state.z[i])].loc;
        const double w = state.w_aug[i];
        const double var = 1.0 / (1.0 / sig2 + 1.0 / w);
        const double mean = var * (u / sig2 + y[i] / w);
        const double x = mean + std::sqrt(var) * rng.normal();
        const double r = y[i] - x;
        if (linnik) {
            // independence Metropolis on the Laplace rate, proposal f_V
            const double v_old = state.v_aug[i];
            const double v_new = linnik_sample_scale(beta, rng);
            const double log_ratio =
                (std::log(v_new) - v_new * std::abs(r)) - (std::log(v_old) - v_old * std::abs(r));
            check_finite(log_ratio, "rate-update ratio");
            if (std::log(rng.uniform()) < log_ratio) state.v_aug[i] = v_new;
            state.w_aug[i] = augment_laplace_rate(r, state.v_aug[i], rng);
        } else {
            state.w_aug[i] = augment_laplace(r, rng);
        }
    }

    // (2) assignments by the auxiliary-atom method
    const int m_aux = config.aux_m;
    std::vector<double> aux(static_cast<std::size_t>(m_aux));
    std::vector<double> logw;
    for (std::size_t i = 0; i < n; ++i) {
        auto& cl = state.clusters;
        const auto old_c = static_cast<std::size_t>(state.z[i]);
        cl[old_c].count -= 1;
        const bool was_singleton = cl[old_c].count == 0;
        double orphan_loc = 0.0;
        if (was_singleton) {
            orphan_loc = cl[old_c].loc;
            // swap-remove; re-point labels at the moved cluster
            const std::size_t last = cl.size() - 1;
            if (old_c != last) {
                cl[old_c] = cl[last];
                for (auto& zj : state.z)
                    if (zj == static_cast<int>(last)) zj = static_cast<int>(old_c);
            }
            cl.pop_back();
        }
        for (int a = 0; a < m_aux; ++a)
            aux[static_cast<std::size_t>(a)] =
                (was_singleton && a == 0) ? orphan_loc : sample_base(config, rng);

        logw.resize(cl.size() + aux.size());
        const double log_aux_mass =
            std::log(config.concentration / static_cast<double>(m_aux));
        for (std::size_t c = 0; c < cl.size(); ++c)
            logw[c] = std::log(static_cast<double>(cl[c].count)) +
                      log_norm(y[i], cl[c].loc, sig2 + state.w_aug[i]);
        for (std::size_t a = 0; a < aux.size(); ++a)
            logw[cl.size() + a] =
                log_aux_mass + log_norm(y[i], aux[a], sig2 + state.w_aug[i]);

        double top = logw[0];
        for (double lw : logw) top = std::max(top, lw);
        check_finite(top, "assignment weight");
        double total = 0.0;
        for (auto& lw : logw) {
            lw = std::exp(lw - top);
            total += lw;
        }
        double udraw = rng.uniform() * total;
        std::size_t pick = logw.size() - 1;
        for (std::size_t k = 0; k < logw.size(); ++k) {
            udraw -= logw[k];
            if (udraw <= 0.0) {
                pick = k;
                break;
            }
        }
        if (pick < cl.size()) {
            cl[pick].count += 1;
            state.z[i] = static_cast<int>(pick);
        } else {
            cl.push_back(Cluster{aux[pick - cl.size()], 1});
            state.z[i] = static_cast<int>(cl.size() - 1);
        }
    }

    // (3) cluster locations by random-walk Metropolis
    std::vector<std::vector<std::size_t>> members(state.clusters.size());
    for (std::size_t i = 0; i < n; ++i)
        members[static_cast<std::size_t>(state.z[i])].push_back(i);
    for (std::size_t c = 0; c < state.clusters.size(); ++c) {
        const double u0 = state.clusters[c].loc;
        const double u1 = u0 + scales.step_loc * rng.normal();
        double dlog = log_base_density(config, u1) - log_base_density(config, u0);
        for (std::size_t i : members[c]) {
            const double var = sig2 + state.w_aug[i];
            const double d0 = y[i] - u0, d1 = y[i] - u1;
            dlog += (d0 * d0 - d1 * d1) / (2.0 * var);
        }
        check_finite(dlog, "location ratio");
        scales.loc_proposals += 1;
        if (std::log(rng.uniform()) < dlog) {
            state.clusters[c].loc = u1;
            scales.loc_accepts += 1;
        }
    }

    // (4) sigma by log-scale random-walk Metropolis
    {
        const double lam0 = std::log(state.sigma);
        const double lam1 = lam0 + scales.step_sigma * rng.normal();
        const double s0 = state.sigma, s1 = std::exp(lam1);
        // inverse-gamma prior density on sigma plus the log-scale Jacobian
        double dlog = -(config.sigma_nu + 1.0) * (lam1 - lam0) -
                      config.sigma_gamma * (1.0 / s1 - 1.0 / s0) + (lam1 - lam0);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = state.clusters[static_cast<std::size_t>(state.z[i])].loc;
            dlog += log_norm(y[i], u, s1 * s1 + state.w_aug[i]) -
                    log_norm(y[i], u, s0 * s0 + state.w_aug[i]);
        }
        check_finite(dlog, "sigma ratio");
        scales.sigma_proposals += 1;
        if (std::log(rng.uniform()) < dlog) {
            state.sigma = s1;
            scales.sigma_accepts += 1;
        }
        check_sigma(state.sigma);
    }

    // step-size adaptation toward acceptance 0.3, burn-in only
    if (adapt && scales.loc_proposals >= 50) {
        const double acc =
            static_cast<double>(scales.loc_accepts) / static_cast<double>(scales.loc_proposals);
        scales.step_loc *= std::exp(0.5 * (acc - 0.3));
        scales.loc_proposals = scales.loc_accepts = 0;
    }
    if (adapt && scales.sigma_proposals >= 50) {
        const double acc = static_cast<double>(scales.sigma_accepts) /
                           static_cast<double>(scales.sigma_proposals);
        scales.step_sigma *= std::exp(0.5 * (acc - 0.3));
        scales.sigma_proposals = scales.sigma_accepts = 0;
    }
}

PosteriorDraws run_chain(std::span<const double> y, const DPMConfig& config) {
    check_config(config, y.size());
    Rng rng(config.seed);
    DPMState state = initial_state(y, config, rng);
    GibbsScales scales;
    PosteriorDraws out;
    out.draws.reserve((config.iters - config.burn) / config.thin);
    for (std::size_t sweep = 1; sweep <= config.iters; ++sweep) {
        const bool adapt = sweep <= config.burn;
        gibbs_sweep(state, y, config, scales, adapt, rng);
        if (sweep > config.burn && (sweep - config.burn) % config.thin == 0) {
            Snapshot snap;
            snap.sigma = state.sigma;
            const double n = static_cast<double>(y.size());
            for (const auto& c : state.clusters) {
                snap.atoms.push_back(c.loc);
                snap.weights.push_back(static_cast<double>(c.count) / n);
            }
            out.draws.push_back(std::move(snap));
        }
    }
    return out;
}

Snapshot sample_prior(const DPMConfig& config, Rng& rng) {
    Snapshot snap;
    // sigma ~ IG(nu, gamma): reciprocal of a Gamma(nu, rate gamma) draw
    snap.sigma = config.sigma_gamma / rng.gamma(config.sigma_nu);
    double remaining = 1.0;
    while (remaining > 1e-10) {
        // stick-breaking: Beta(1, concentration) via two gamma draws
        const double g1 = rng.gamma(1.0);
        const double g2 = rng.gamma(config.concentration);
        const double frac = g1 / (g1 + g2);
        snap.atoms.push_back(sample_base(config, rng));
        snap.weights.push_back(remaining * frac);
        remaining *= (1.0 - frac);
    }
    // fold the residual stick into the last atom so weights sum to one
    snap.weights.back() += remaining;
    return snap;
}

std::vector<double> posterior_w1(const PosteriorDraws& draws, const ProbabilityMeasure& mu0X) {
    std::vector<double> out;
    out.reserve(draws.draws.size());
    for (const auto& s : draws.draws)
        out.push_back(w1(ProbabilityMeasure::gauss_mix(s.atoms, s.weights, s.sigma), mu0X));
    return out;
}

std::vector<double> posterior_predictive_l1(const PosteriorDraws& draws, const NoiseModel& noise,
                                            const GridFunction& f0Y) {
    std::vector<double> out;
    out.reserve(draws.draws.size());
    const std::size_t n = f0Y.size();
    auto freqs = fft_freqs(f0Y.lo(), f0Y.hi(), n);
    std::vector<std::complex<double>> noise_cf(n);
    for (std::size_t j = 0; j < n; ++j) noise_cf[j] = noise.cf(freqs[j]);

    for (const auto& s : draws.draws) {
        std::vector<std::complex<double>> fy(n);
        const double s2 = s.sigma * s.sigma;
        for (std::size_t j = 0; j < n; ++j) {
            const double t = freqs[j];
            std::complex<double> mix = 0.0;
            for (std::size_t c = 0; c < s.atoms.size(); ++c)
                mix += s.weights[c] *
                       std::complex<double>(std::cos(t * s.atoms[c]), std::sin(t * s.atoms[c]));
            fy[j] = noise_cf[j] * mix * std::exp(-0.5 * s2 * t * t);
        }
        GridFunction fy_grid =
            fourier_inverse(Spectrum(f0Y.lo(), f0Y.hi(), freqs, std::move(fy)));
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::abs(fy_grid[k] - f0Y[k]);
            acc += (k == 0 || k + 1 == n) ? 0.5 * d : d;
        }
        out.push_back(acc * f0Y.spacing());
    }
    return out;
}

void write_snapshots_jsonl(const PosteriorDraws& draws, std::ostream& os) {
    char buf[64];
    for (const auto& s : draws.draws) {
        std::snprintf(buf, sizeof buf, "{\"sigma\":%.17g,\"atoms\":[", s.sigma);
        os << buf;
        for (std::size_t i = 0; i < s.atoms.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", s.atoms[i]);
            os << buf;
        }
        os << "],\"weights\":[";
        for (std::size_t i = 0; i < s.weights.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", s.weights[i]);
            os << buf;
        }
        os << "]}\n";
    }
}

}  // namespace wdecon
