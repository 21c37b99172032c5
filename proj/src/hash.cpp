#include "sectionseg/hash.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

namespace sectionseg {

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int digest_len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest.data(), &digest_len, EVP_sha256(), nullptr);
    std::string hex;
    hex.reserve(2 * digest_len);
    static const char* kDigits = "0123456789abcdef";
    for (unsigned int i = 0; i < digest_len; ++i) {
        hex.push_back(kDigits[digest[i] >> 4]);
        hex.push_back(kDigits[digest[i] & 0xf]);
    }
    return hex;
}

} // namespace sectionseg
