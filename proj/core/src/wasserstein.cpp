#include "wdecon/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wdecon {

namespace {

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void check_weights(const std::vector<double>& atoms, const std::vector<double>& weights) {
    if (atoms.size() != weights.size() || atoms.empty())
        throw std::invalid_argument("atoms/weights size mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw std::invalid_argument("weights must sum to 1 within 1e-10");
}

}  // namespace

ProbabilityMeasure ProbabilityMeasure::empirical(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("empirical sample must be nonempty");
    std::sort(sample.begin(), sample.end());
    return ProbabilityMeasure(Empirical{std::move(sample)});
}

ProbabilityMeasure ProbabilityMeasure::discrete(std::vector<double> atoms,
                                                std::vector<double> weights) {
    check_weights(atoms, weights);
    std::vector<std::size_t> order(atoms.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
    std::vector<double> a2(atoms.size()), w2(atoms.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        a2[i] = atoms[order[i]];
        w2[i] = weights[order[i]];
    }
    return ProbabilityMeasure(Discrete{std::move(a2), std::move(w2)});
}

ProbabilityMeasure ProbabilityMeasure::grid_density(GridFunction density) {
    auto d = std::make_shared<const GridFunction>(std::move(density));
    auto c = std::make_shared<const GridFunction>(cdf_from_density(*d));
    return ProbabilityMeasure(GridDensity{std::move(d), std::move(c)});
}

ProbabilityMeasure ProbabilityMeasure::gauss_mix(std::vector<double> atoms,
                                                 std::vector<double> weights, double sigma) {
    check_weights(atoms, weights);
    if (!(sigma > 0.0)) throw std::invalid_argument("GaussMix sigma must be positive");
    return ProbabilityMeasure(GaussMix{std::move(atoms), std::move(weights), sigma});
}

double ProbabilityMeasure::cdf(double x) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Empirical>) {
                const auto it = std::upper_bound(r.sample.begin(), r.sample.end(), x);
                return static_cast<double>(it - r.sample.begin()) /
                       static_cast<double>(r.sample.size());
            } else if constexpr (std::is_same_v<T, Discrete>) {
                double acc = 0.0;
                for (std::size_t i = 0; i < r.atoms.size() && r.atoms[i] <= x; ++i)
                    acc += r.weights[i];
                return acc;
            } else if constexpr (std::is_same_v<T, GridDensity>) {
                if (x <= r.cdf->lo()) return 0.0;
                if (x >= r.cdf->hi()) return 1.0;
                return r.cdf->at(x);
            } else {
                double acc = 0.0;
                for (std::size_t i = 0; i < r.atoms.size(); ++i)
                    acc += r.weights[i] * phi_cdf((x - r.atoms[i]) / r.sigma);
                return acc;
            }
        },
        repr_);
}

double ProbabilityMeasure::cdf_left(double x) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Empirical>) {
                const auto it = std::lower_bound(r.sample.begin(), r.sample.end(), x);
                return static_cast<double>(it - r.sample.begin()) /
                       static_cast<double>(r.sample.size());
            } else if constexpr (std::is_same_v<T, Discrete>) {
                double acc = 0.0;
                for (std::size_t i = 0; i < r.atoms.size() && r.atoms[i] < x; ++i)
                    acc += r.weights[i];
                return acc;
            } else {
                return cdf(x);
            }
        },
        repr_);
}

bool ProbabilityMeasure::is_step() const {
    return std::holds_alternative<Empirical>(repr_) || std::holds_alternative<Discrete>(repr_);
}

double ProbabilityMeasure::support_lo() const {
    return std::visit(
        [](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Empirical>) return r.sample.front();
            else if constexpr (std::is_same_v<T, Discrete>) return r.atoms.front();
            else if constexpr (std::is_same_v<T, GridDensity>) return r.density->lo();
            else return *std::min_element(r.atoms.begin(), r.atoms.end()) - 10.0 * r.sigma;
        },
        repr_);
}

double ProbabilityMeasure::support_hi() const {
    return std::visit(
        [](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Empirical>) return r.sample.back();
            else if constexpr (std::is_same_v<T, Discrete>) return r.atoms.back();
            else if constexpr (std::is_same_v<T, GridDensity>) return r.density->hi();
            else return *std::max_element(r.atoms.begin(), r.atoms.end()) + 10.0 * r.sigma;
        },
        repr_);
}

std::vector<double> ProbabilityMeasure::breakpoints() const {
    if (const auto* e = std::get_if<Empirical>(&repr_)) return e->sample;
    if (const auto* d = std::get_if<Discrete>(&repr_)) return d->atoms;
    return {};
}

ProbabilityMeasure ProbabilityMeasure::translated(double c) const {
    return std::visit(
        [&](const auto& r) -> ProbabilityMeasure {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Empirical>) {
                auto s = r.sample;
                for (auto& v : s) v += c;
                return empirical(std::move(s));
            } else if constexpr (std::is_same_v<T, Discrete>) {
                auto a = r.atoms;
                for (auto& v : a) v += c;
                return discrete(std::move(a), r.weights);
            } else if constexpr (std::is_same_v<T, GridDensity>) {
                return grid_density(GridFunction(r.density->lo() + c, r.density->hi() + c,
                                                 r.density->values()));
            } else {
                auto a = r.atoms;
                for (auto& v : a) v += c;
                return gauss_mix(std::move(a), r.weights, r.sigma);
            }
        },
        repr_);
}

namespace {

//! Exact integral of |F - G| for two step CDFs.
double w1_steps(const ProbabilityMeasure& mu, const ProbabilityMeasure& nu) {
    std::vector<double> nodes = mu.breakpoints();
    const auto bn = nu.breakpoints();
    nodes.insert(nodes.end(), bn.begin(), bn.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double gap = nodes[i + 1] - nodes[i];
        acc += gap * std::abs(mu.cdf(nodes[i]) - nu.cdf(nodes[i]));
    }
    return acc;
}

double tail_mass(const ProbabilityMeasure& m, double lo, double hi) {
    return m.cdf(lo) + (1.0 - m.cdf(hi));
}

//! Simpson integration of |F - G| between consecutive nodes, with one-sided
//! limits at step breakpoints.
double w1_quadrature(const ProbabilityMeasure& mu, const ProbabilityMeasure& nu) {
    const double lo = std::min(mu.support_lo(), nu.support_lo()) - 1.0;
    const double hi = std::max(mu.support_hi(), nu.support_hi()) + 1.0;
    if (tail_mass(mu, lo, hi) > 1e-4 || tail_mass(nu, lo, hi) > 1e-4)
        throw std::invalid_argument("w1: tail mass beyond the integration window");

    const std::size_t n_uniform = 1 << 14;
    std::vector<double> nodes;
    nodes.reserve(n_uniform + 64);
    const double dx = (hi - lo) / static_cast<double>(n_uniform);
    for (std::size_t k = 0; k <= n_uniform; ++k) nodes.push_back(lo + dx * static_cast<double>(k));
    for (const auto& m : {std::cref(mu), std::cref(nu)}) {
        const auto bp = m.get().breakpoints();
        nodes.insert(nodes.end(), bp.begin(), bp.end());
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i], b = nodes[i + 1];
        const double m = 0.5 * (a + b);
        const double va = std::abs(mu.cdf(a) - nu.cdf(a));          // right limit at a
        const double vm = std::abs(mu.cdf(m) - nu.cdf(m));
        const double vb = std::abs(mu.cdf_left(b) - nu.cdf_left(b)); // left limit at b
        acc += (b - a) / 6.0 * (va + 4.0 * vm + vb);
    }
    return acc;
}

}  // namespace

double w1(const ProbabilityMeasure& mu, const ProbabilityMeasure& nu) {
    const auto* em = std::get_if<ProbabilityMeasure::Empirical>(&mu.repr());
    const auto* en = std::get_if<ProbabilityMeasure::Empirical>(&nu.repr());
    if (em && en && em->sample.size() == en->sample.size()) {
        // sorted-sample L1 formula for equal sizes
        double acc = 0.0;
        for (std::size_t i = 0; i < em->sample.size(); ++i)
            acc += std::abs(em->sample[i] - en->sample[i]);
        return acc / static_cast<double>(em->sample.size());
    }
    if (mu.is_step() && nu.is_step()) return w1_steps(mu, nu);
    return w1_quadrature(mu, nu);
}

double dkw_threshold(std::size_t n, double delta) {
    if (n == 0) throw std::invalid_argument("dkw_threshold: n must be >= 1");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("dkw_threshold: delta must lie in (0, 1)");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

DkwResult dkw_test(const std::vector<double>& sample, const ProbabilityMeasure& mu0,
                   double delta) {
    if (sample.empty()) throw std::invalid_argument("dkw_test: empty sample");
    if (mu0.is_step())
        throw std::invalid_argument("dkw_test: mu0 must have a continuous CDF");
    const double stat = w1(ProbabilityMeasure::empirical(sample), mu0);
    const double thr = dkw_threshold(sample.size(), delta);
    return DkwResult{stat, thr, stat > thr};
}

}  // namespace wdecon
