#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace wdecon {

//! Seeded PRNG (xoshiro256++) with the distributions the samplers need.
//!
//! All draws are produced from explicit integer arithmetic and <cmath>
//! calls, so a fixed seed yields a bit-identical stream on one platform.
//! Worker streams are derived from a master seed with `Rng::stream`,
//! which feeds (seed, index) through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the 256-bit state
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    //! Independent stream `idx` of a master seed.
    static Rng stream(std::uint64_t master, std::uint64_t idx) {
        std::uint64_t x = master;
        std::uint64_t a = splitmix64(x);
        x ^= idx * 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = splitmix64(x);
        return Rng(a ^ (b + 0x2545f4914f6cdd1dULL * (idx + 1)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    //! Uniform in (0, 1): 53-bit mantissa, never exactly 0 or 1.
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    //! Standard normal via Box-Muller (no cached spare).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    //! Standard Laplace, density e^{-|x|}/2.
    double laplace() {
        const double u = uniform() - 0.5;
        return (u < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(u));
    }

    //! Gamma(shape, scale 1) by Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        if (shape <= 0.0) throw std::invalid_argument("gamma: shape must be positive");
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    //! Inverse-Gaussian(mu, lambda) by the Michael-Schucany-Haas method.
    //! The small root is computed in rationalized form, which stays
    //! strictly positive where the textbook expression cancels to zero.
    double inverse_gaussian(double mu, double lambda) {
        const double nu = normal();
        const double c = mu * nu * nu / lambda;
        const double x = mu / (1.0 + 0.5 * c + std::sqrt(c + 0.25 * c * c));
        if (uniform() <= mu / (mu + x)) return x;
        return mu * mu / x;
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
};

}  // namespace wdecon
