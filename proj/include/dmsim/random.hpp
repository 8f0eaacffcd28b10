#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dmsim {

/// Generator used everywhere in this project. Fixed repo-wide and recorded
/// in run_meta so results can be reproduced across versions.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "std::mt19937_64";

/// SplitMix64 finalizer; the building block of seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent child seed from a master seed and up to two
/// indices (sweep cell, replicate). Pure, so sweeps stay reproducible under
/// any parallel schedule.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
    const std::uint64_t s = splitmix64(master ^ (0x9E3779B97F4A7C15ull * (a + 1)));
    return splitmix64(s ^ (0xC2B2AE3D27D4EB4Full * (b + 1)));
}

/// Uniform draw in [0, 1) with 53 random bits. Implemented by hand so the
/// value stream does not depend on the standard library's distribution
/// internals.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Normal draw via Box-Muller (cosine branch). Consumes exactly two
/// uniforms per call, which keeps draw accounting trivial.
inline double normal(Rng& rng, double mean = 0.0, double stddev = 1.0) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dmsim
