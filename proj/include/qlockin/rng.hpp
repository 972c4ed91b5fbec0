#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qlockin {

/// splitmix64 finalizer; used for seed expansion and substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic per-stream seed from a master seed. Fixed (master, stream)
/// gives the same substream regardless of how many other streams exist or
/// which thread consumes it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0xD6E8FEB86659FD93ULL + 0xA5A5A5A5A5A5A5A5ULL);
    std::uint64_t b = splitmix64(s);
    return b;
}

/// xoshiro256** seeded via splitmix64. Hand-rolled so that bit streams are
/// identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    static Rng substream(std::uint64_t master, std::uint64_t stream) {
        return Rng(derive_seed(master, stream));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Poisson sample, Knuth's multiplicative method. Means above the chunk
    /// limit are drawn as sums of independent smaller Poissons, which keeps
    /// the product method inside double range at any mean.
    long long poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
        long long total = 0;
        constexpr double kChunk = 500.0;
        while (mean > kChunk) {
            total += poisson_knuth(kChunk);
            mean -= kChunk;
        }
        return total + poisson_knuth(mean);
    }

  private:
    static constexpr double kTau = 6.283185307179586476925286766559;

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    long long poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        long long k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }

    std::uint64_t seed_;
    std::uint64_t state_[4];
};

} // namespace qlockin
