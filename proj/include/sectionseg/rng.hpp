#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace sectionseg {

// All randomized operations draw from mt19937_64 through the helpers below.
// std::shuffle and the std distributions are implementation-defined, so the
// bounded draw and the Fisher-Yates shuffle are spelled out here to keep
// seeded runs byte-identical across standard libraries.
using Rng = std::mt19937_64;

inline Rng seeded_rng(std::uint64_t seed) {
    return Rng{seed};
}

// Bounded draw by modulo reduction. The bias is irrelevant for split/bootstrap
// purposes; determinism is what matters.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return rng() % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void seeded_shuffle(std::vector<T>& values, Rng& rng) {
    if (values.size() < 2) return;
    for (std::size_t i = values.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i + 1));
        using std::swap;
        swap(values[i], values[j]);
    }
}

} // namespace sectionseg
