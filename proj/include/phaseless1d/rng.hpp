#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace ph1d {

// Counter-style deterministic noise: every record derives its perturbation from
// (seed, k, x, channel) alone, so sweeps can run in any order (or in parallel)
// and still produce byte-identical output. std::normal_distribution is
// implementation-defined, hence the hand-rolled Box-Muller.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0,1)
}

// Standard normal draw keyed by (seed, k, x, channel).
inline double gaussian_noise(std::uint64_t seed, double k, double x, std::uint32_t channel) {
    std::uint64_t h = splitmix64(seed);
    h = hash_combine(h, std::bit_cast<std::uint64_t>(k));
    h = hash_combine(h, std::bit_cast<std::uint64_t>(x));
    h = hash_combine(h, channel);
    const double u1 = 1.0 - uniform01(h);  // (0,1], keeps log finite
    const double u2 = uniform01(splitmix64(h));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace ph1d
