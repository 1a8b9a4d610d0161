#pragma once

// Counter-based random streams: every draw is a pure function of
// (master seed, realization, site, component, draw counter), so disorder
// realizations are replayable and parallel-safe.

#include <cstdint>
#include <cmath>

namespace rfo {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
}

// stream key for one (master, realization, site, component) quadruple
inline std::uint64_t derive_key(std::uint64_t master, std::uint64_t realization,
                                std::uint64_t site, std::uint64_t component) {
    return mix_keys(mix_keys(mix_keys(master, realization), site), component);
}

// uniform in (0,1), never exactly 0 or 1
inline double counter_uniform01(std::uint64_t key, std::uint64_t counter) {
    const std::uint64_t bits = splitmix64(key ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// standard gaussian via Box-Muller; consumes counters 2*counter, 2*counter+1
inline double counter_gaussian(std::uint64_t key, std::uint64_t counter) {
    const double u1 = counter_uniform01(key, 2 * counter);
    const double u2 = counter_uniform01(key, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// symmetric truncated gaussian: resample until |z| <= bound
inline double counter_truncated_gaussian(std::uint64_t key, double bound) {
    for (std::uint64_t c = 0;; ++c) {
        const double z = counter_gaussian(key, c);
        if (std::fabs(z) <= bound) return z;
    }
}

} // namespace rfo
