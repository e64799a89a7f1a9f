#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace heavytail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-trial substream: root seed mixed with the trial counter through
// splitmix64 so streams are independent of worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

// Seeded random source. All draws are explicit transforms of the raw
// 64-bit stream so a (seed, call sequence) pair fixes every output bit.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(eng_() >> 12) + 0.5) * 0x1p-52;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double exponential() { return -std::log(uniform()); }

    // Box-Muller: exactly two uniforms per normal draw, no cached state.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Marsaglia-Tsang, with the shape boost for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace heavytail
