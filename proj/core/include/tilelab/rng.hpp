#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tilelab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Splittable counter-based seeding: parallel callers derive disjoint streams
// from (base, stream, substream) without sharing generator state.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t substream = 0) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xd6e8feb86659fd93ULL;
    std::uint64_t b = splitmix64(s);
    s ^= substream * 0xa5a5a5a5a5a5a5a5ULL + 0x2545f4914f6cdd1dULL;
    return a ^ b ^ splitmix64(s);
}

// mt19937_64 wrapped with fully specified variate transforms so that sampled
// sequences do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1); safe to pass through log().
    double uniform_open() { return (static_cast<double>(eng_() >> 12) + 0.5) * 0x1.0p-52; }

    double normal() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cache_ = r * std::sin(a);
        has_cache_ = true;
        return r * std::cos(a);
    }

    double exponential() { return -std::log(uniform_open()); }

    // Marsaglia-Tsang; requires shape >= 1 (all callers go through alpha+1).
    double gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::mt19937_64 eng_;
    double cache_ = 0.0;
    bool has_cache_ = false;
};

}  // namespace tilelab
