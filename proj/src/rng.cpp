#include "lexharvest/rng.hpp"

#include <numeric>
#include <unordered_map>

namespace lexharvest {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    // Sparse Fisher-Yates: only touched slots are stored, so drawing a small
    // sample from a large pool stays O(k) memory.
    std::unordered_map<std::size_t, std::size_t> swapped;
    swapped.reserve(k * 2);
    auto value_at = [&](std::size_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded(rng, n - i));
        out.push_back(value_at(j));
        swapped[j] = value_at(i);
    }
    return out;
}

}  // namespace lexharvest
