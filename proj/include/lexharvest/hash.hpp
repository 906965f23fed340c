#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lexharvest {

// Seeded FNV-1a over (seed as 8 little-endian bytes || data). This is the
// pinned featurization hash ("fnv1a64/v1") recorded in checkpoints; changing
// it invalidates every serialized model.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0) {
    std::uint64_t h = 14695981039346656037ULL;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xFF;
        h *= 1099511628211ULL;
    }
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Hex fingerprint of a byte string, used in run logs and training metadata.
std::string fingerprint_hex(std::string_view data);

// Streaming fingerprint of a file's bytes. Throws DataError if unreadable.
std::string fingerprint_file(const std::string& path);

}  // namespace lexharvest
