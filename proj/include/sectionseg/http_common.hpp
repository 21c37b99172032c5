#pragma once

#include <string>
#include <utility>

namespace sectionseg {

inline constexpr const char* kApiKeyEnv = "SECTIONSEG_API_KEY";
inline constexpr const char* kApiBaseEnv = "SECTIONSEG_API_BASE";

// Splits "scheme://host:port/prefix" into the client root and the path
// prefix ("" when absent).
std::pair<std::string, std::string> split_base_url(const std::string& base_url);

// Resolves the endpoint root: explicit value wins, then SECTIONSEG_API_BASE.
std::string resolve_base_url(const std::string& configured);

// Bearer token from SECTIONSEG_API_KEY; empty when unset.
std::string api_key_from_env();

bool retryable_status(int status);

} // namespace sectionseg
