#include "wdecon/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wdecon {

namespace {

constexpr double kPi = std::numbers::pi;

//! T_k(x) on [-1, 1].
double cheb(int k, double x) {
    x = std::clamp(x, -1.0, 1.0);
    return std::cos(static_cast<double>(k) * std::acos(x));
}

//! Integrals of T_k and x T_k over [x0, x1] in closed form, for the exact
//! piecewise-linear moment computation. Uses
//! int T_k = T_{k+1}/(2(k+1)) - T_{k-1}/(2(k-1)) and x T_k = (T_{k+1}+T_{k-1})/2.
double cheb_antideriv(int k, double x) {
    if (k == 0) return x;
    if (k == 1) return 0.5 * x * x;
    return cheb(k + 1, x) / (2.0 * (k + 1)) - cheb(k - 1, x) / (2.0 * (k - 1));
}

double int_cheb(int k, double x0, double x1) {
    return cheb_antideriv(k, x1) - cheb_antideriv(k, x0);
}

double int_x_cheb(int k, double x0, double x1) {
    if (k == 0) return 0.5 * (x1 * x1 - x0 * x0);
    return 0.5 * (int_cheb(k + 1, x0, x1) + int_cheb(std::abs(k - 1), x0, x1));
}

//! Integrals of e^{bx} and x e^{bx} over [x0, x1].
double int_exp(double b, double x0, double x1) {
    return (std::exp(b * x1) - std::exp(b * x0)) / b;
}

double int_x_exp(double b, double x0, double x1) {
    auto f = [&](double x) { return std::exp(b * x) * (x / b - 1.0 / (b * b)); };
    return f(x1) - f(x0);
}

//! Dense phase-1 simplex for { w >= 0 : A w = b }, returning a basic
//! feasible point. A is m x nc; artificial variables complete the basis.
struct SimplexResult {
    bool feasible;
    std::vector<int> support;      // candidate-column indices with weight
    std::vector<double> weights;   // matching weights
    double objective;              // residual mass left in the artificials
};

SimplexResult phase1_simplex(const std::vector<std::vector<double>>& A,
                             const std::vector<double>& b_in) {
    const std::size_t m = A.size();
    const std::size_t nc = A[0].size();
    const std::size_t total = nc + m;

    // rows scaled so b >= 0; artificial j has +1 in row j
    std::vector<double> sign(m, 1.0), b(b_in);
    for (std::size_t r = 0; r < m; ++r)
        if (b[r] < 0.0) {
            sign[r] = -1.0;
            b[r] = -b[r];
        }

    // tableau rows: m constraint rows + objective; columns: total + rhs
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(total + 1, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < nc; ++c) t[r][c] = sign[r] * A[r][c];
        t[r][nc + r] = 1.0;
        t[r][total] = b[r];
    }
    // objective row: minimize sum of artificials, expressed in reduced form
    for (std::size_t c = 0; c <= total; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < m; ++r) acc += t[r][c];
        t[m][c] = (c >= nc && c < total) ? acc - 1.0 : acc;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) basis[r] = nc + r;

    const std::size_t max_iter = 60 * (m + nc);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // Dantzig rule over candidate columns only
        std::size_t pivot_col = total;
        double best = 1e-11;
        for (std::size_t c = 0; c < nc; ++c) {
            if (t[m][c] > best) {
                best = t[m][c];
                pivot_col = c;
            }
        }
        if (pivot_col == total) break;  // optimal

        std::size_t pivot_row = m;
        double best_ratio = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (t[r][pivot_col] > 1e-12) {
                const double ratio = t[r][total] / t[r][pivot_col];
                if (pivot_row == m || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] > basis[pivot_row])) {
                    best_ratio = ratio;
                    pivot_row = r;
                }
            }
        }
        if (pivot_row == m) break;  // unbounded cannot occur here; bail out

        const double pd = t[pivot_row][pivot_col];
        for (std::size_t c = 0; c <= total; ++c) t[pivot_row][c] /= pd;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == pivot_row) continue;
            const double factor = t[r][pivot_col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c <= total; ++c) t[r][c] -= factor * t[pivot_row][c];
        }
        basis[pivot_row] = pivot_col;
    }

    SimplexResult out;
    out.objective = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] >= nc) out.objective += t[r][total];
    out.feasible = out.objective <= 1e-9;
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < nc && t[r][total] > 1e-14) {
            out.support.push_back(static_cast<int>(basis[r]));
            out.weights.push_back(t[r][total]);
        }
    }
    return out;
}

//! Least-squares re-solve of A_S w = b on the simplex support via normal
//! equations with Cholesky; cleans accumulated pivot roundoff.
bool refine_on_support(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                       const std::vector<int>& support, std::vector<double>& weights) {
    const std::size_t m = A.size();
    const std::size_t k = support.size();
    std::vector<std::vector<double>> G(k, std::vector<double>(k, 0.0));
    std::vector<double> rhs(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m; ++r)
                acc += A[r][static_cast<std::size_t>(support[i])] *
                       A[r][static_cast<std::size_t>(support[j])];
            G[i][j] = G[j][i] = acc;
        }
        for (std::size_t r = 0; r < m; ++r)
            rhs[i] += A[r][static_cast<std::size_t>(support[i])] * b[r];
    }
    // Cholesky with a tiny ridge for safety
    for (std::size_t i = 0; i < k; ++i) G[i][i] += 1e-14;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = G[i][j];
            for (std::size_t p = 0; p < j; ++p) acc -= G[i][p] * G[j][p];
            if (i == j) {
                if (acc <= 0.0) return false;
                G[i][i] = std::sqrt(acc);
            } else {
                G[i][j] = acc / G[j][j];
            }
        }
    }
    std::vector<double> z(k);
    for (std::size_t i = 0; i < k; ++i) {
        double acc = rhs[i];
        for (std::size_t p = 0; p < i; ++p) acc -= G[i][p] * z[p];
        z[i] = acc / G[i][i];
    }
    std::vector<double> w(k);
    for (std::size_t ii = k; ii-- > 0;) {
        double acc = z[ii];
        for (std::size_t p = ii + 1; p < k; ++p) acc -= G[p][ii] * w[p];
        w[ii] = acc / G[ii][ii];
    }
    for (double v : w)
        if (v < -1e-10) return false;
    for (auto& v : w) v = std::max(v, 0.0);
    weights = std::move(w);
    return true;
}

}  // namespace

GridFunction truncate_renormalize(const GridFunction& f0x, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("truncate_renormalize: a must be positive");
    const std::size_t n = 1 << 12;
    const double dx = 2.0 * a / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    double mass = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        vals[k] = std::max(f0x.at(-a + dx * static_cast<double>(k)), 0.0);
        mass += (k == 0 || k + 1 == n) ? 0.5 * vals[k] : vals[k];
    }
    mass *= dx;
    if (mass <= 0.5)
        throw std::invalid_argument("truncate_renormalize: less than half the mass captured");
    for (auto& v : vals) v /= mass;
    return GridFunction(-a, a, std::move(vals));
}

MomentTargets moment_targets(const GridFunction& f, const MomentSpec& spec) {
    const int J = spec.J;
    MomentTargets out;
    out.values.assign(static_cast<std::size_t>(J) + 2, 0.0);
    const std::size_t n = f.size();
    // exact integrals of (linear segment) x (basis function), segment by segment
    for (std::size_t s = 0; s + 1 < n; ++s) {
        const double x0 = f.x(s), x1 = f.x(s + 1);
        const double f0 = f[s], f1 = f[s + 1];
        // f(x) = c0 + c1 x on the segment
        const double c1 = (f1 - f0) / (x1 - x0);
        const double c0 = f0 - c1 * x0;
        const double u0 = x0 / spec.a, u1 = x1 / spec.a;
        for (int j = 0; j < J; ++j) {
            // substitute u = x/a: dx = a du
            out.values[static_cast<std::size_t>(j)] +=
                spec.a * (c0 * int_cheb(j, u0, u1) +
                          c1 * spec.a * int_x_cheb(j, u0, u1));
        }
        out.values[static_cast<std::size_t>(J)] +=
            c0 * int_exp(0.5, x0, x1) + c1 * int_x_exp(0.5, x0, x1);
        out.values[static_cast<std::size_t>(J) + 1] +=
            c0 * int_exp(-0.5, x0, x1) + c1 * int_x_exp(-0.5, x0, x1);
    }
    return out;
}

int moment_budget(double a, double sigma, double eta) {
    return static_cast<int>(
        std::ceil(eta * std::numbers::e * (a / sigma) * std::sqrt(std::abs(std::log(sigma)))));
}

MomentMatch match_moments(const GridFunction& f_trunc, const MomentSpec& spec) {
    if (spec.J < 1) throw std::invalid_argument("match_moments: J must be >= 1");
    if (spec.n_target < spec.J / 2 + 2)
        throw std::invalid_argument("match_moments: atom budget below J/2 + 2");
    const int J = spec.J;
    const std::size_t m = static_cast<std::size_t>(J) + 2;
    MomentTargets targets = moment_targets(f_trunc, spec);

    // candidate atoms, cos-spaced so high-degree rows stay resolved near
    // the support edges; density doubles on retry if phase 1 stalls
    for (int densify = 1; densify <= 4; densify *= 2) {
        const std::size_t nc =
            static_cast<std::size_t>(20 * spec.n_target * densify);
        std::vector<double> atoms(nc);
        for (std::size_t k = 0; k < nc; ++k)
            atoms[k] = -spec.a * std::cos(kPi * static_cast<double>(k) /
                                          static_cast<double>(nc - 1));

        std::vector<std::vector<double>> A(m, std::vector<double>(nc));
        for (std::size_t k = 0; k < nc; ++k) {
            const double u = atoms[k] / spec.a;
            for (int j = 0; j < J; ++j) A[static_cast<std::size_t>(j)][k] = cheb(j, u);
            A[static_cast<std::size_t>(J)][k] = std::exp(0.5 * atoms[k]);
            A[static_cast<std::size_t>(J) + 1][k] = std::exp(-0.5 * atoms[k]);
        }

        SimplexResult sol = phase1_simplex(A, targets.values);
        if (!sol.feasible) continue;
        refine_on_support(A, targets.values, sol.support, sol.weights);

        std::vector<double> out_atoms, out_w;
        double wsum = 0.0;
        for (std::size_t i = 0; i < sol.support.size(); ++i) {
            if (sol.weights[i] <= 1e-14) continue;
            out_atoms.push_back(atoms[static_cast<std::size_t>(sol.support[i])]);
            out_w.push_back(sol.weights[i]);
            wsum += sol.weights[i];
        }
        for (auto& w : out_w) w /= wsum;  // exact unit mass for the ctor

        // residuals against the exact targets
        double worst = std::abs(wsum - 1.0);
        for (std::size_t r = 0; r < m; ++r) {
            double acc = 0.0;
            for (std::size_t i = 0; i < out_atoms.size(); ++i) {
                const double u = out_atoms[i] / spec.a;
                const double basis = (r < static_cast<std::size_t>(J))
                                         ? cheb(static_cast<int>(r), u)
                                         : std::exp((r == static_cast<std::size_t>(J) ? 0.5 : -0.5) *
                                                    out_atoms[i]);
                acc += out_w[i] * basis;
            }
            worst = std::max(worst, std::abs(acc - targets.values[r]));
        }
        if (worst > 1e-9) continue;
        if (out_atoms.size() > static_cast<std::size_t>(J) + 3)
            throw std::logic_error("match_moments: support exceeds the J+3 bound");
        return MomentMatch{ProbabilityMeasure::discrete(std::move(out_atoms), std::move(out_w)),
                           worst};
    }
    throw std::runtime_error(
        "match_moments: infeasible at tolerance 1e-9 (candidate grid exhausted)");
}

double hellinger_gap(const ProbabilityMeasure& muH, double sigma, const GridFunction& f0X,
                     const NoiseModel& noise) {
    // Linnik tails decay like |u|^{-(1+beta)}; the window must hold the
    // mass deficit below the hellinger precondition
    const bool heavy = noise.kind() == NoiseKind::Linnik;
    const GridSpec spec = heavy ? GridSpec{-256.0, 256.0, 1 << 16}
                                : GridSpec{-40.0, 40.0, 1 << 14};
    auto freqs = fft_freqs(spec.lo, spec.hi, spec.n);

    const auto* d = std::get_if<ProbabilityMeasure::Discrete>(&muH.repr());
    if (!d) throw std::invalid_argument("hellinger_gap: muH must be a discrete measure");

    std::vector<std::complex<double>> fy(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        const double t = freqs[j];
        std::complex<double> mix = 0.0;
        for (std::size_t c = 0; c < d->atoms.size(); ++c)
            mix += d->weights[c] *
                   std::complex<double>(std::cos(t * d->atoms[c]), std::sin(t * d->atoms[c]));
        fy[j] = noise.cf(t) * mix * std::exp(-0.5 * sigma * sigma * t * t);
    }
    GridFunction fy_grid = fourier_inverse(Spectrum(spec.lo, spec.hi, freqs, std::move(fy)));

    Spectrum f0x_hat = fourier_forward(resample(f0X, spec));
    std::vector<std::complex<double>> f0y(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) f0y[j] = noise.cf(freqs[j]) * f0x_hat[j];
    GridFunction f0y_grid =
        fourier_inverse(Spectrum(spec.lo, spec.hi, std::move(freqs), std::move(f0y)));

    return hellinger(fy_grid, f0y_grid);
}

}  // namespace wdecon
