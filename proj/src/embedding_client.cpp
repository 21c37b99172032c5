#include "sectionseg/embedding_client.hpp"

#include <chrono>
#include <exception>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sectionseg/errors.hpp"
#include "sectionseg/http_common.hpp"

namespace sectionseg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<Eigen::VectorXd> fetch_batch(const EmbeddingProviderConfig& config,
                                         const std::string& root, const std::string& prefix,
                                         const std::vector<std::string>& lines) {
    httplib::Client client(root);
    client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(config.timeout_ms));

    httplib::Headers headers;
    if (const std::string key = api_key_from_env(); !key.empty()) {
        headers.emplace("Authorization", "Bearer " + key);
    }

    const std::string body = embed_request_body(config, lines);
    const std::string path = prefix + "/v1/embeddings";

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) { // one retry on transient failure
        auto response = client.Post(path, headers, body, "application/json");
        if (!response) {
            last_error = httplib::to_string(response.error());
            continue;
        }
        if (response->status != 200) {
            if (!retryable_status(response->status)) {
                throw HttpStatusError(response->status,
                                      "embedding endpoint returned status " +
                                          std::to_string(response->status));
            }
            last_error = "status " + std::to_string(response->status);
            continue;
        }
        std::vector<Eigen::VectorXd> vectors(lines.size());
        std::vector<bool> seen(lines.size(), false);
        try {
            const auto parsed = nlohmann::json::parse(response->body);
            for (const auto& item : parsed.at("data")) {
                const auto index = item.at("index").get<std::size_t>();
                if (index >= lines.size() || seen[index]) {
                    throw TransportError("embedding response index out of range");
                }
                const auto& coords = item.at("embedding");
                if (coords.size() != config.embed_dim) {
                    throw DimensionMismatch(
                        "embedding endpoint returned dim " + std::to_string(coords.size()) +
                        ", expected " + std::to_string(config.embed_dim));
                }
                Eigen::VectorXd vec(static_cast<Eigen::Index>(coords.size()));
                for (std::size_t d = 0; d < coords.size(); ++d) {
                    vec(static_cast<Eigen::Index>(d)) = coords.at(d).get<double>();
                }
                vectors[index] = std::move(vec);
                seen[index] = true;
            }
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed embedding response: ") + e.what());
        }
        for (std::size_t i = 0; i < seen.size(); ++i) {
            if (!seen[i]) throw TransportError("embedding response missing index " +
                                               std::to_string(i));
        }
        return vectors;
    }
    throw TransportError("embedding endpoint unreachable: " + last_error);
}

} // namespace

std::string embed_request_body(const EmbeddingProviderConfig& config,
                               const std::vector<std::string>& lines) {
    ordered_json body;
    body["model"] = config.model_name;
    body["input"] = lines;
    return body.dump();
}

std::vector<Eigen::VectorXd> remote_embed(const EmbeddingProviderConfig& config,
                                          const std::vector<std::string>& lines) {
    if (config.embed_dim < 1) throw UsageError("remote_embed: embed_dim must be >= 1");
    if (lines.empty()) return {};

    const auto [root, prefix] = split_base_url(resolve_base_url(config.base_url));
    const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);
    const std::size_t batch_count = (lines.size() + batch_size - 1) / batch_size;

    std::vector<std::vector<Eigen::VectorXd>> results(batch_count);
    std::vector<std::exception_ptr> failures(batch_count);

    const std::size_t in_flight = std::max(1, config.max_in_flight);
    for (std::size_t wave = 0; wave < batch_count; wave += in_flight) {
        std::vector<std::thread> workers;
        const std::size_t wave_end = std::min(batch_count, wave + in_flight);
        for (std::size_t b = wave; b < wave_end; ++b) {
            workers.emplace_back([&, b] {
                try {
                    const std::size_t begin = b * batch_size;
                    const std::size_t end = std::min(lines.size(), begin + batch_size);
                    results[b] = fetch_batch(
                        config, root, prefix,
                        std::vector<std::string>(lines.begin() + begin, lines.begin() + end));
                } catch (...) {
                    failures[b] = std::current_exception();
                }
            });
        }
        for (std::thread& worker : workers) worker.join();
    }
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<Eigen::VectorXd> flat;
    flat.reserve(lines.size());
    for (std::vector<Eigen::VectorXd>& batch : results) {
        for (Eigen::VectorXd& vec : batch) flat.push_back(std::move(vec));
    }
    return flat;
}

} // namespace sectionseg
