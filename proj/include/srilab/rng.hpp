#pragma once

#include <cstdint>
#include <random>

#include "srilab/linalg.hpp"

namespace srilab {

/// Seeded random stream. All draws are implemented on top of the raw
/// mt19937_64 output so that a (seed, call sequence) pair reproduces the
/// exact same values on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Marsaglia's polar method (pairs are cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    /// +1 or -1 with equal probability.
    double rademacher() { return (eng_() & 1u) ? 1.0 : -1.0; }

    Vec gaussian_vector(std::size_t d) {
        Vec x(d);
        for (auto& e : x) e = gaussian();
        return x;
    }

    Vec unit_vector(std::size_t d) {
        while (true) {
            Vec x = gaussian_vector(d);
            const double n = norm(x);
            if (n > 1e-12) return (1.0 / n) * x;
        }
    }

    /// Uniform point in the closed ball of given radius around the origin.
    Vec ball_point(std::size_t d, double radius) {
        Vec u = unit_vector(d);
        const double r = radius * std::pow(uniform01(), 1.0 / static_cast<double>(d));
        return r * u;
    }

    /// Child stream with a decorrelated seed; used to fan out workers.
    RngStream split(std::uint64_t salt) const {
        std::uint64_t s = seed_ ^ (0x9E3779B97F4A7C15ull * (salt + 1));
        return RngStream(s);
    }

private:
    std::mt19937_64 eng_;
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace srilab
