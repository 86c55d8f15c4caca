#pragma once

#include <cmath>
#include <cstdint>

namespace adrceq {

/// Counter-based Gaussian draws: sample k depends only on (seed, k), so runs
/// are reproducible regardless of evaluation order.
namespace noise {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double unit_open(std::uint64_t bits) {
    // (0, 1): never exactly 0 so the Box-Muller log stays finite.
    return (static_cast<double>(bits >> 11) + 1.0) * (1.0 / 9007199254740993.0);
}

inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(2 * counter));
    const std::uint64_t b = splitmix64(seed ^ splitmix64(2 * counter + 1));
    const double u1 = unit_open(a);
    const double u2 = static_cast<double>(b >> 11) * (1.0 / 9007199254740992.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace noise
} // namespace adrceq
