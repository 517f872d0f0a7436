#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace epipolicy {

// Deterministic random stream. mt19937_64 is fully specified by the C++
// standard and all variate transforms below are hand-rolled, so a given
// (seed, call sequence) reproduces the same values on every rebuild.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Stream derivation rule: stream k of master seed s is seeded with
    // splitmix64(s + (k+1) * golden_gamma). Documented so that chains run
    // separately and chains run in one process agree bit for bit.
    static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1); never returns 0 or 1, so the
    // result is always safe under log().
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        const double u = uniform();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
    }

    // Marsaglia–Tsang squeeze for shape >= 1, boosted by u^(1/shape) below 1.
    double gamma(double shape, double rate = 1.0) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    // Components with nonpositive concentration get zero mass (degenerate
    // Dirichlet limit); if everything underflows the largest alpha wins.
    std::array<double, 3> dirichlet(const std::array<double, 3>& alpha) {
        std::array<double, 3> g{};
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            g[k] = alpha[k] > 0.0 ? gamma(alpha[k]) : 0.0;
            total += g[k];
        }
        if (total <= 0.0) {
            int arg = 0;
            for (int k = 1; k < 3; ++k) {
                if (alpha[k] > alpha[arg]) arg = k;
            }
            g = {0.0, 0.0, 0.0};
            g[arg] = 1.0;
            return g;
        }
        for (double& v : g) v /= total;
        return g;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace epipolicy
