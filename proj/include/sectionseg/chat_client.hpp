#pragma once

#include <cstddef>
#include <string>

#include "sectionseg/prompt.hpp"

namespace sectionseg {

struct CompletionClientConfig {
    std::string base_url;       // falls back to SECTIONSEG_API_BASE
    std::string model_name;
    double temperature = 0.0;
    std::size_t max_output_tokens = 0; // 0 = auto: 8 * line count + 64
    int timeout_ms = 30000;
    int max_retries = 2;
    int max_in_flight = 4;
    int backoff_ms = 250; // doubled per retry
};

struct CompletionResult {
    std::string content;
    int retries = 0;
};

// Serialized request body; exposed so the wire format can be pinned.
std::string chat_request_body(const CompletionClientConfig& config, const PromptBundle& bundle);

// POSTs {base_url}/v1/chat/completions and returns the assistant content.
// Transport failures, retryable statuses (429/5xx), and empty content retry
// up to max_retries with exponential backoff; other statuses fail fast.
CompletionResult request_completion(const CompletionClientConfig& config,
                                    const PromptBundle& bundle);

} // namespace sectionseg
