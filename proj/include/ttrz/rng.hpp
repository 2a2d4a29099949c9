#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ttrz {

// The <random> distributions are implementation-defined; these fixed
// transforms keep every seeded run reproducible bit-for-bit.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(gen);
}

/// Standard normal via Box-Muller.
inline double standard_normal(std::mt19937_64& gen) {
    double u1 = uniform_unit(gen);
    double u2 = uniform_unit(gen);
    while (u1 <= 0.0) u1 = uniform_unit(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Uniform index in [0, n) by rejection.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen();
    while (x >= limit) x = gen();
    return static_cast<std::size_t>(x % n);
}

/// In-place Fisher-Yates shuffle using uniform_index.
template <typename T>
void shuffle_indices(std::vector<T>& v, std::mt19937_64& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = uniform_index(gen, i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace ttrz
