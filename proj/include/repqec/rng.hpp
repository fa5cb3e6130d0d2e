#pragma once

#include <cstdint>
#include <random>

namespace repqec {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent per-sample stream from (root seed, sample index,
// retry counter). Results are therefore independent of how samples are
// distributed over workers.
inline std::mt19937_64 sample_stream(uint64_t root_seed, uint64_t sample_index,
                                     uint64_t retry = 0) {
    uint64_t s = splitmix64(root_seed ^ splitmix64(sample_index + 1));
    if (retry) s = splitmix64(s ^ splitmix64(retry * 0x5851f42d4c957f2dULL));
    return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace repqec
