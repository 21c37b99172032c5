#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sectionseg/chat_client.hpp"
#include "sectionseg/embedding_client.hpp"
#include "sectionseg/errors.hpp"
#include "sectionseg/http_common.hpp"

#include "support/stub_server.hpp"

using namespace sectionseg;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    while (!text.empty() && text.back() == '\n') text.pop_back();
    return text;
}

PromptBundle tiny_bundle() {
    PromptBundle bundle;
    bundle.family = PromptFamily::llama;
    bundle.expected_line_count = 2;
    bundle.messages.push_back({"system", "You are a test system."});
    bundle.messages.push_back({"user", "Line 0: a\nLine 1: b"});
    return bundle;
}

} // namespace

TEST_CASE("split_base_url") {
    CHECK(split_base_url("http://127.0.0.1:8080") ==
          std::pair<std::string, std::string>{"http://127.0.0.1:8080", ""});
    CHECK(split_base_url("http://host:9/api/") ==
          std::pair<std::string, std::string>{"http://host:9", "/api"});
    CHECK_THROWS_AS(split_base_url("localhost:8080"), UsageError);
}

TEST_CASE("chat request body matches the frozen wire format") {
    CompletionClientConfig config;
    config.base_url = "http://unused:1";
    config.model_name = "test-model";
    const std::string body = chat_request_body(config, tiny_bundle());
    CHECK(body == read_file(std::string(SECTIONSEG_GOLDEN_DIR) + "/chat_request.json"));
    // auto token budget: 8 * 2 + 64
    CHECK(body.find("\"max_tokens\":80") != std::string::npos);
}

TEST_CASE("request_completion") {
    SUBCASE("verbatim pass-through of the stub content") {
        stub::StubServer server;
        stub::serve_chat(server, [](const nlohmann::json&) { return "canned output"; });
        server.start();
        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "m";
        const CompletionResult result = request_completion(config, tiny_bundle());
        CHECK(result.content == "canned output");
        CHECK(result.retries == 0);
    }
    SUBCASE("429 then 200 retries exactly once") {
        std::atomic<int> calls{0};
        stub::StubServer server;
        server.raw().Post("/v1/chat/completions",
                          [&](const httplib::Request&, httplib::Response& response) {
                              if (++calls == 1) {
                                  response.status = 429;
                                  response.set_content("{}", "application/json");
                              } else {
                                  response.set_content(stub::chat_response_body("ok"),
                                                       "application/json");
                              }
                          });
        server.start();
        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "m";
        config.backoff_ms = 1;
        const CompletionResult result = request_completion(config, tiny_bundle());
        CHECK(result.content == "ok");
        CHECK(result.retries == 1);
        CHECK(calls.load() == 2);
    }
    SUBCASE("empty content retries, then surfaces EmptyCompletion") {
        std::atomic<int> calls{0};
        stub::StubServer server;
        stub::serve_chat(server, [&](const nlohmann::json&) {
            ++calls;
            return "";
        });
        server.start();
        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "m";
        config.max_retries = 2;
        config.backoff_ms = 1;
        CHECK_THROWS_AS(request_completion(config, tiny_bundle()), EmptyCompletion);
        CHECK(calls.load() == 3);
    }
    SUBCASE("non-retryable status fails fast") {
        std::atomic<int> calls{0};
        stub::StubServer server;
        server.raw().Post("/v1/chat/completions",
                          [&](const httplib::Request&, httplib::Response& response) {
                              ++calls;
                              response.status = 400;
                              response.set_content("{}", "application/json");
                          });
        server.start();
        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "m";
        config.backoff_ms = 1;
        CHECK_THROWS_AS(request_completion(config, tiny_bundle()), HttpStatusError);
        CHECK(calls.load() == 1);
    }
    SUBCASE("unreachable endpoint raises TransportError") {
        CompletionClientConfig config;
        config.base_url = "http://127.0.0.1:1";
        config.model_name = "m";
        config.max_retries = 0;
        config.timeout_ms = 200;
        config.backoff_ms = 1;
        CHECK_THROWS_AS(request_completion(config, tiny_bundle()), TransportError);
    }
    SUBCASE("bearer token from the environment") {
        stub::StubServer server;
        std::string seen_auth;
        server.raw().Post("/v1/chat/completions",
                          [&](const httplib::Request& request, httplib::Response& response) {
                              seen_auth = request.get_header_value("Authorization");
                              response.set_content(stub::chat_response_body("ok"),
                                                   "application/json");
                          });
        server.start();
        setenv(kApiKeyEnv, "sekret", 1);
        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "m";
        request_completion(config, tiny_bundle());
        unsetenv(kApiKeyEnv);
        CHECK(seen_auth == "Bearer sekret");
    }
    SUBCASE("base url from the environment when the flag is absent") {
        stub::StubServer server;
        stub::serve_chat(server, [](const nlohmann::json&) { return "env ok"; });
        server.start();
        setenv(kApiBaseEnv, server.base_url().c_str(), 1);
        CompletionClientConfig config;
        config.model_name = "m";
        const CompletionResult result = request_completion(config, tiny_bundle());
        unsetenv(kApiBaseEnv);
        CHECK(result.content == "env ok");
    }
}

TEST_CASE("embed request body matches the frozen wire format") {
    EmbeddingProviderConfig config;
    config.model_name = "embed-model";
    config.embed_dim = 3;
    const std::string body = embed_request_body(config, {"first line", "second line"});
    CHECK(body == read_file(std::string(SECTIONSEG_GOLDEN_DIR) + "/embed_request.json"));
}

TEST_CASE("remote_embed") {
    const auto embedding_of = [](const std::string& text) {
        // deterministic 3-vector derived from the text
        return std::vector<double>{double(text.size()), double(text.empty() ? 0 : text[0]),
                                   1.0};
    };

    SUBCASE("shape contract and input order") {
        stub::StubServer server;
        stub::serve_embeddings(server, embedding_of);
        server.start();
        EmbeddingProviderConfig config;
        config.base_url = server.base_url();
        config.model_name = "e";
        config.embed_dim = 3;
        const std::vector<std::string> lines = {"alpha", "bb", "c"};
        const auto vectors = remote_embed(config, lines);
        REQUIRE(vectors.size() == 3);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            CHECK(vectors[i].size() == 3);
            CHECK(vectors[i](0) == doctest::Approx(double(lines[i].size())));
        }
    }
    SUBCASE("responses delivered out of order are reassembled by index") {
        stub::StubServer server;
        stub::serve_embeddings(server, embedding_of, /*reverse_order=*/true);
        server.start();
        EmbeddingProviderConfig config;
        config.base_url = server.base_url();
        config.model_name = "e";
        config.embed_dim = 3;
        const auto vectors = remote_embed(config, {"alpha", "bb"});
        REQUIRE(vectors.size() == 2);
        CHECK(vectors[0](0) == doctest::Approx(5.0));
        CHECK(vectors[1](0) == doctest::Approx(2.0));
    }
    SUBCASE("wrong dimension raises DimensionMismatch") {
        stub::StubServer server;
        stub::serve_embeddings(server, embedding_of);
        server.start();
        EmbeddingProviderConfig config;
        config.base_url = server.base_url();
        config.model_name = "e";
        config.embed_dim = 4; // provider returns 3
        CHECK_THROWS_AS(remote_embed(config, {"x"}), DimensionMismatch);
    }
    SUBCASE("batching splits requests and preserves order") {
        std::atomic<int> requests{0};
        stub::StubServer server;
        server.raw().Post("/v1/embeddings", [&](const httplib::Request& request,
                                                httplib::Response& response) {
            ++requests;
            const auto body = nlohmann::json::parse(request.body);
            nlohmann::json data = nlohmann::json::array();
            for (std::size_t i = 0; i < body.at("input").size(); ++i) {
                const std::string text = body.at("input").at(i).get<std::string>();
                data.push_back(
                    {{"index", i}, {"embedding", {double(text.size()), 0.0, 1.0}}});
            }
            response.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
        });
        server.start();
        EmbeddingProviderConfig config;
        config.base_url = server.base_url();
        config.model_name = "e";
        config.embed_dim = 3;
        config.batch_size = 3;
        config.max_in_flight = 2;
        std::vector<std::string> lines;
        for (int i = 0; i < 10; ++i) lines.push_back(std::string(std::size_t(i + 1), 'x'));
        const auto vectors = remote_embed(config, lines);
        REQUIRE(vectors.size() == 10);
        CHECK(requests.load() == 4);
        for (int i = 0; i < 10; ++i) CHECK(vectors[i](0) == doctest::Approx(i + 1.0));
    }
    SUBCASE("transient failure is retried once") {
        std::atomic<int> calls{0};
        stub::StubServer server;
        server.raw().Post("/v1/embeddings", [&](const httplib::Request& request,
                                                httplib::Response& response) {
            if (++calls == 1) {
                response.status = 503;
                response.set_content("{}", "application/json");
                return;
            }
            const auto body = nlohmann::json::parse(request.body);
            nlohmann::json data = nlohmann::json::array();
            for (std::size_t i = 0; i < body.at("input").size(); ++i) {
                data.push_back({{"index", i}, {"embedding", {1.0, 2.0}}});
            }
            response.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
        });
        server.start();
        EmbeddingProviderConfig config;
        config.base_url = server.base_url();
        config.model_name = "e";
        config.embed_dim = 2;
        const auto vectors = remote_embed(config, {"x"});
        CHECK(vectors.size() == 1);
        CHECK(calls.load() == 2);
    }
}
