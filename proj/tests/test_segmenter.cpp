#include <doctest.h>

#include <atomic>

#include "sectionseg/corpus_io.hpp"
#include "sectionseg/errors.hpp"
#include "sectionseg/rng.hpp"
#include "sectionseg/segmenter.hpp"

#include "support/stub_server.hpp"

using namespace sectionseg;

TEST_CASE("parse_predictions") {
    SUBCASE("clean two-line output") {
        const ParsedPrediction parsed = parse_predictions("Line 0: <none>\nLine 1: imaging", 2);
        CHECK(parsed.labels == std::vector<std::string>{"<none>", "imaging"});
        CHECK(parsed.diagnostics.parsed_count == 2);
        CHECK(parsed.diagnostics.unparseable_lines.empty());
        CHECK(parsed.diagnostics.order_violations == 0);
    }
    SUBCASE("headers are normalized") {
        const ParsedPrediction parsed = parse_predictions("Line 0: Social History:", 1);
        CHECK(parsed.labels == std::vector<std::string>{"social-history"});
    }
    SUBCASE("messy completion with preamble, bullet, and commentary") {
        const std::string raw = "Sure! Here are the section headers you asked for:\n"
                                "- Line 2 : Chief Complaint\n"
                                "Hope this helps, let me know if you need more.";
        const ParsedPrediction parsed = parse_predictions(raw, 3);
        CHECK(parsed.labels == std::vector<std::string>{"chief-complaint"});
        CHECK(parsed.diagnostics.parsed_count == 1);
        REQUIRE(parsed.diagnostics.unparseable_lines.size() == 2);
        CHECK(parsed.diagnostics.unparseable_lines[0].find("Sure!") == 0);
    }
    SUBCASE("case-insensitive marker, flexible whitespace, inline preamble") {
        const ParsedPrediction parsed =
            parse_predictions("answer: LINE  4  :  Labs\nline 5:past medical history", 2);
        CHECK(parsed.labels ==
              std::vector<std::string>{"labs", "past-medical-history"});
    }
    SUBCASE("out-of-order indices raise a diagnostic") {
        const ParsedPrediction parsed =
            parse_predictions("Line 1: labs\nLine 0: imaging\nLine 2: labs", 3);
        CHECK(parsed.diagnostics.order_violations == 1);
        CHECK(parsed.labels.size() == 3);
    }
    SUBCASE("no matches at all") {
        CHECK_THROWS_AS(parse_predictions("I cannot help with that request.", 3),
                        NoParsableLines);
        CHECK_THROWS_AS(parse_predictions("", 3), NoParsableLines);
    }
    SUBCASE("empty header after the colon is unparseable") {
        const ParsedPrediction parsed =
            parse_predictions("Line 0: labs\nLine 1:\nLine 2: !!!", 3);
        CHECK(parsed.labels == std::vector<std::string>{"labs"});
        CHECK(parsed.diagnostics.unparseable_lines.size() == 2);
    }
}

TEST_CASE("reconcile_length") {
    const auto make = [](std::vector<std::string> labels) {
        ParsedPrediction p;
        p.labels = std::move(labels);
        p.diagnostics.parsed_count = p.labels.size();
        return p;
    };
    SUBCASE("equal counts pass through") {
        const ParsedPrediction out = reconcile_length(make({"a", "b", "c"}), 3);
        CHECK(out.labels == std::vector<std::string>{"a", "b", "c"});
        CHECK(out.diagnostics.padded == 0);
        CHECK(out.diagnostics.truncated == 0);
    }
    SUBCASE("excess labels are truncated from the tail") {
        const ParsedPrediction out = reconcile_length(make({"a", "b", "c", "d", "e"}), 3);
        CHECK(out.labels == std::vector<std::string>{"a", "b", "c"});
        CHECK(out.diagnostics.truncated == 2);
    }
    SUBCASE("missing labels pad with the outside label") {
        const ParsedPrediction out = reconcile_length(make({"a", "b"}), 4);
        CHECK(out.labels == std::vector<std::string>{"a", "b", "<none>", "<none>"});
        CHECK(out.diagnostics.padded == 2);
    }
}

TEST_CASE("parse plus reconcile always yields the expected length") {
    Rng rng = seeded_rng(123);
    const std::vector<std::string> headers = {"labs", "Social History", "IMAGING", "made-up",
                                              "<none>", "a/p"};
    const std::vector<std::string> noise = {"Here is the answer:", "", "I hope this helps",
                                            "```", "Note lines follow."};
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t expected = 1 + uniform_index(rng, 12);
        std::string raw;
        // guarantee at least one parsable line
        raw += "Line 0: " + headers[uniform_index(rng, headers.size())] + "\n";
        const std::size_t extra = uniform_index(rng, 20);
        for (std::size_t i = 0; i < extra; ++i) {
            if (uniform_unit(rng) < 0.4) {
                raw += noise[uniform_index(rng, noise.size())] + "\n";
            } else {
                raw += "Line " + std::to_string(uniform_index(rng, 20)) + ": " +
                       headers[uniform_index(rng, headers.size())] + "\n";
            }
        }
        const ParsedPrediction out =
            reconcile_length(parse_predictions(raw, expected), expected);
        CHECK(out.labels.size() == expected);
    }
}

TEST_CASE("segment_with_llm against a stub endpoint") {
    const LabelSet labels("stub", {"<none>", "labs", "imaging"});
    const std::vector<Note> notes = {
        {"n0", std::nullopt, {"cbc drawn", "xray chest"}},
        {"n1", std::nullopt, {"mri head"}},
        {"n2", std::nullopt, {"cmp drawn", "us abdomen", "follow up"}},
    };

    SUBCASE("perfect stub yields aligned predictions with clean diagnostics") {
        stub::StubServer server;
        stub::serve_chat(server, [](const nlohmann::json& request) {
            // answer "labs" for every enumerated note line
            const std::string content = request.at("messages").back().at("content");
            // count enumerated lines between "Clinical Note:" and "Select"
            const std::size_t begin = content.find("Clinical Note:\n");
            const std::size_t end = content.find("\nSelect");
            std::size_t lines = 0;
            for (std::size_t pos = content.find("Line ", begin);
                 pos != std::string::npos && pos < end; pos = content.find("Line ", pos + 1)) {
                ++lines;
            }
            std::string reply;
            for (std::size_t i = 0; i < lines; ++i) {
                reply += "Line " + std::to_string(i) + ": labs\n";
            }
            return reply;
        });
        server.start();

        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "stub-model";
        config.max_in_flight = 2;
        const auto outcomes = segment_with_llm(config, notes, labels, PromptFamily::llama);
        REQUIRE(outcomes.size() == 3);
        for (std::size_t i = 0; i < notes.size(); ++i) {
            CHECK(outcomes[i].note_id == notes[i].note_id);
            REQUIRE(outcomes[i].prediction.has_value());
            CHECK(outcomes[i].prediction->labels.size() == notes[i].lines.size());
            CHECK(outcomes[i].prediction->diagnostics.padded == 0);
            CHECK(outcomes[i].prediction->diagnostics.truncated == 0);
            CHECK(outcomes[i].error.empty());
            CHECK_FALSE(outcomes[i].prompt_sha256.empty());
        }
    }

    SUBCASE("a failing note is isolated; the rest succeed") {
        std::atomic<int> calls{0};
        stub::StubServer server;
        server.raw().Post("/v1/chat/completions", [&](const httplib::Request& request,
                                                      httplib::Response& response) {
            const auto body = nlohmann::json::parse(request.body);
            const std::string content = body.at("messages").back().at("content");
            ++calls;
            if (content.find("mri head") != std::string::npos) {
                response.status = 400; // fatal for this note only
                response.set_content("{}", "application/json");
                return;
            }
            response.set_content(
                stub::chat_response_body("Line 0: labs\nLine 1: labs\nLine 2: labs"),
                "application/json");
        });
        server.start();

        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "stub-model";
        config.max_in_flight = 1;
        const auto outcomes = segment_with_llm(config, notes, labels, PromptFamily::llama);
        REQUIRE(outcomes.size() == 3);
        CHECK(outcomes[0].prediction.has_value());
        CHECK_FALSE(outcomes[1].prediction.has_value());
        CHECK_FALSE(outcomes[1].error.empty());
        CHECK(outcomes[2].prediction.has_value());
    }

    SUBCASE("one automatic re-prompt on an unparseable completion") {
        std::atomic<int> calls{0};
        stub::StubServer server;
        stub::serve_chat(server, [&](const nlohmann::json&) -> std::string {
            return ++calls == 1 ? "no structured output here" : "Line 0: labs";
        });
        server.start();

        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "stub-model";
        const std::vector<Note> one = {{"n", std::nullopt, {"cbc"}}};
        const auto outcomes = segment_with_llm(config, one, labels, PromptFamily::llama);
        REQUIRE(outcomes.size() == 1);
        REQUIRE(outcomes[0].prediction.has_value());
        CHECK(outcomes[0].prediction->labels == std::vector<std::string>{"labs"});
        CHECK(calls.load() == 2);
    }

    SUBCASE("end-to-end fixture with a canned llama-style completion") {
        stub::StubServer server;
        stub::serve_chat(server, [](const nlohmann::json&) {
            return std::string("Section Headers:\n"
                               "Line 0: Labs\n"
                               "Line 1: Imaging\n"
                               "Line 2: Radiology Findings\n"); // not in the set, kept raw
        });
        server.start();

        CompletionClientConfig config;
        config.base_url = server.base_url();
        config.model_name = "stub-model";
        const std::vector<Note> one = {{"n", std::nullopt, {"a", "b", "c"}}};
        const auto outcomes = segment_with_llm(config, one, labels, PromptFamily::llama);
        REQUIRE(outcomes[0].prediction.has_value());
        CHECK(outcomes[0].prediction->labels ==
              std::vector<std::string>{"labs", "imaging", "radiology-findings"});
    }
}
