#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sectionseg {

// 64-bit FNV-1a. Feature indices and config fingerprints depend on this exact
// constant pair, so it is pinned here rather than taken from a library.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const char c : bytes) {
        hash ^= static_cast<std::uint8_t>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

std::string to_hex(std::uint64_t value);

// Lowercase hex SHA-256 digest; used for prompt audit trails.
std::string sha256_hex(std::string_view bytes);

} // namespace sectionseg
