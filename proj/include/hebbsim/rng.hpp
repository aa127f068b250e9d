#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hebbsim {

/// splitmix64 mixing step; used both to derive independent sub-stream seeds
/// from a master seed and as a counter-based hash for the oracle's
/// reproducible waiting times.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

/// Deterministic RNG wrapper. All distribution draws are implemented by
/// hand (inverse CDF / Box-Muller) so a given engine state always yields the
/// same values regardless of standard-library version.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1): 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential waiting time with the given rate (inverse CDF).
    double exponential(double rate) {
        // 1 - u in (0, 1] keeps log() finite.
        return -std::log(1.0 - uniform01()) / rate;
    }

    /// Standard normal via Box-Muller (one draw per call, second discarded to
    /// keep the stream position independent of call parity).
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Modulo bias is irrelevant at the sizes used here (dataset indices).
        return engine_() % n;
    }

    /// Categorical draw by inverse CDF over unnormalised weights.
    int categorical(const std::vector<double>& weights, double total) {
        double x = uniform01() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            x -= weights[i];
            if (x < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Exponential sample from a single 64-bit hash value, for counter-based
/// (stateless) waiting-time generation.
inline double exponential_from_hash(std::uint64_t h, double rate) {
    const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(u) / rate;
}

}  // namespace hebbsim
