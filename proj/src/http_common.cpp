#include "sectionseg/http_common.hpp"

#include <cstdlib>

#include "sectionseg/errors.hpp"

namespace sectionseg {

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw UsageError("base URL '" + base_url + "' must include a scheme");
    }
    const auto path_begin = base_url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_begin);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_begin), prefix};
}

std::string resolve_base_url(const std::string& configured) {
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv(kApiBaseEnv); env != nullptr && *env != '\0') {
        return env;
    }
    throw UsageError("no endpoint configured: set --base-url or " + std::string(kApiBaseEnv));
}

std::string api_key_from_env() {
    const char* env = std::getenv(kApiKeyEnv);
    return env == nullptr ? std::string() : std::string(env);
}

bool retryable_status(int status) {
    return status == 429 || status >= 500;
}

} // namespace sectionseg
