#pragma once

// Seeded randomness helpers. std::mt19937_64 is fully specified by the
// standard; the distributions here are hand-rolled because the std
// distribution algorithms are implementation-defined and outputs must be
// reproducible for a given seed.

#include <cstdint>
#include <random>
#include <vector>

namespace parksent::rng {

using Engine = std::mt19937_64;

// Derives an independent stream for sub-task `index` (permutation i, tree
// i, ...) so parallel schedules cannot change results.
inline Engine derive(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over (seed, index)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Engine(z ^ (z >> 31));
}

// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::size_t uniform_index(Engine& eng, std::size_t n) {
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return static_cast<std::size_t>(v % n);
}

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double normal(Engine& eng) {
    // Marsaglia polar method; deterministic given the engine state.
    while (true) {
        double u = 2.0 * uniform01(eng) - 1.0;
        double v = 2.0 * uniform01(eng) - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0)
            return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(eng, i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace parksent::rng
