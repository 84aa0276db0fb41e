#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mimocfo {

// splitmix64 finalizer, used to fold (master seed, cell id, trial id) into a
// well-spread 64-bit stream seed.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// FNV-1a, for deriving stable cell ids from config key strings.
inline uint64_t fnv1a64(const char* s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (; *s; ++s) {
        h ^= static_cast<unsigned char>(*s);
        h *= 0x100000001b3ull;
    }
    return h;
}

/**
 * Deterministic random stream.
 *
 * The core is std::mt19937_64 (bit-exact output is pinned by the standard);
 * uniform/normal transforms are done by hand so that results never depend on
 * the standard library's distribution implementations. One trial of the
 * Monte-Carlo loop owns one Rng, derived from (master seed, cell, trial), so
 * runs are reproducible regardless of scheduling.
 */
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    static Rng derive(uint64_t master, uint64_t a, uint64_t b = 0) {
        return Rng(mix64(master ^ mix64(a ^ mix64(b))));
    }

    uint64_t bits() { return gen_(); }

    int bit() { return static_cast<int>(gen_() >> 63); }

    // uniform on (0,1), strictly inside the interval
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    // uniform integer in [0, n), rejection sampled (unbiased)
    uint64_t below(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // standard normal, Box-Muller with a cached spare
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // circularly-symmetric complex Gaussian, E|z|^2 = variance
    std::complex<double> cgaussian(double variance) {
        const double s = std::sqrt(0.5 * variance);
        const double re = s * gaussian();
        const double im = s * gaussian();
        return {re, im};
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mimocfo
