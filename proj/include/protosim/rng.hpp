#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace protosim {

// splitmix64 step, used only to derive well-separated seeds for sub-streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for sub-stream (stream, channel) of a base seed. Distinct argument
// triples give statistically independent generator states.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t channel) {
    std::uint64_t s = base;
    std::uint64_t out = splitmix64(s);
    s ^= 0xbf58476d1ce4e5b9ULL * (stream + 1);
    out ^= splitmix64(s);
    s ^= 0x94d049bb133111ebULL * (channel + 1);
    out ^= splitmix64(s);
    return out;
}

/// Deterministic random stream. Every draw is mapped by hand from raw
/// mt19937_64 output so that sequences do not depend on the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential variate with the given rate (mean 1 / rate).
    double exponential(double rate) {
        if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be positive");
        return -std::log1p(-uniform01()) / rate;
    }

    /// Gaussian variate via Box-Muller. No cached spare, one value per call.
    double gaussian(double mean, double stddev) {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("below: n must be positive");
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t overflow = (max % n + 1) % n;  // 2^64 mod n
        std::uint64_t x = engine_();
        if (overflow != 0) {
            const std::uint64_t limit = max - overflow + 1;  // largest multiple of n
            while (x >= limit) x = engine_();
        }
        return x % n;
    }

    /// First k positions of a Fisher-Yates shuffle of 0..n-1, in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("sample_indices: k exceeds n");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace protosim
