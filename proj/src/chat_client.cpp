#include "sectionseg/chat_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sectionseg/errors.hpp"
#include "sectionseg/http_common.hpp"

namespace sectionseg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::size_t auto_max_tokens(const PromptBundle& bundle) {
    return 8 * bundle.expected_line_count + 64;
}

} // namespace

std::string chat_request_body(const CompletionClientConfig& config, const PromptBundle& bundle) {
    ordered_json body;
    body["model"] = config.model_name;
    body["messages"] = ordered_json::array();
    for (const ChatMessage& message : bundle.messages) {
        body["messages"].push_back({{"role", message.role}, {"content", message.content}});
    }
    body["temperature"] = config.temperature;
    body["max_tokens"] = config.max_output_tokens > 0 ? config.max_output_tokens
                                                      : auto_max_tokens(bundle);
    return body.dump();
}

CompletionResult request_completion(const CompletionClientConfig& config,
                                    const PromptBundle& bundle) {
    const auto [root, prefix] = split_base_url(resolve_base_url(config.base_url));
    httplib::Client client(root);
    client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(config.timeout_ms));

    httplib::Headers headers;
    if (const std::string key = api_key_from_env(); !key.empty()) {
        headers.emplace("Authorization", "Bearer " + key);
    }

    const std::string body = chat_request_body(config, bundle);
    const std::string path = prefix + "/v1/chat/completions";

    std::string last_error;
    int last_status = 0;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
        }
        auto response = client.Post(path, headers, body, "application/json");
        if (!response) {
            last_error = httplib::to_string(response.error());
            continue;
        }
        if (response->status != 200) {
            last_status = response->status;
            if (!retryable_status(response->status)) {
                throw HttpStatusError(response->status,
                                      "chat endpoint returned status " +
                                          std::to_string(response->status));
            }
            last_error = "status " + std::to_string(response->status);
            continue;
        }
        std::string content;
        try {
            const auto parsed = nlohmann::json::parse(response->body);
            content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed chat response: ") + e.what());
        }
        if (content.empty()) {
            last_error = "empty completion";
            continue;
        }
        return CompletionResult{std::move(content), attempt};
    }
    if (last_error == "empty completion") {
        throw EmptyCompletion("chat endpoint returned empty content after " +
                              std::to_string(config.max_retries + 1) + " attempts");
    }
    if (last_status != 0 && retryable_status(last_status)) {
        throw HttpStatusError(last_status, "chat endpoint failed with status " +
                                               std::to_string(last_status) + " after retries");
    }
    throw TransportError("chat endpoint unreachable: " + last_error);
}

} // namespace sectionseg
