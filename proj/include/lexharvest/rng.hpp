#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lexharvest {

// All sampling goes through these helpers rather than std <random>
// distributions, whose outputs are not pinned by the standard. mt19937_64
// itself is bit-reproducible everywhere.
using Rng = std::mt19937_64;

// Unbiased integer in [0, n) via rejection sampling. n must be > 0.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

// Uniform double in [0, 1) with 53 bits of entropy.
inline double unit_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// k distinct indices drawn uniformly from [0, n), in draw order
// (partial Fisher-Yates). Requires k <= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace lexharvest
