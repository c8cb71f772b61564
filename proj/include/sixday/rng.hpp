#pragma once

#include <cstdint>
#include <string_view>

#include "sixday/math.hpp"

// Deterministic random number generation. Sampler chains and synthetic
// datasets must be bit-reproducible across platforms for a given seed, so
// the generator and all variate transforms are spelled out here instead of
// relying on implementation-defined std::distribution behavior.

namespace sixday::rng {

inline constexpr std::string_view kAlgorithmName = "xoshiro256++/splitmix64";

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Derives an independent stream (replicate loops, per-walker seeds).
    [[nodiscard]] Rng split(std::uint64_t stream) const {
        std::uint64_t sm = state_[0] ^ (0xA02BDBF7BB3C0A7ULL * (stream + 1));
        Rng child(0);
        for (auto& word : child.state_) word = splitmix64(sm);
        return child;
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

    // Uniform on the open interval (0,1); never returns an endpoint, so it
    // is safe to feed through norm_ppf or log.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection to remove modulo bias.
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via inverse-CDF; monotone in the underlying uniform.
    double normal() {
        return math::norm_ppf(uniform01());
    }

    // Poisson by Knuth's product method, halving recursively so exp(-mean)
    // never underflows.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::uint64_t total = 0;
        while (mean > 500.0) {
            total += poisson_small(250.0);
            mean -= 250.0;
        }
        return total + poisson_small(mean);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t poisson_small(double mean) {
        const double threshold = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > threshold);
        return k - 1;
    }

    std::uint64_t state_[4];
};

}  // namespace sixday::rng
