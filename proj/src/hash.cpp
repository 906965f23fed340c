#include "lexharvest/hash.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "lexharvest/errors.hpp"

namespace lexharvest {

namespace {

std::string to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace

std::string fingerprint_hex(std::string_view data) { return to_hex(fnv1a64(data)); }

std::string fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for fingerprinting: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    for (int i = 0; i < 8; ++i) h *= 1099511628211ULL;  // seed = 0 prefix
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
            h *= 1099511628211ULL;
        }
    }
    return to_hex(h);
}

}  // namespace lexharvest
