#include <doctest.h>

#include <algorithm>

#include "sectionseg/errors.hpp"
#include "sectionseg/features.hpp"
#include "sectionseg/hash.hpp"

#include "support/oracles.hpp"

using namespace sectionseg;

namespace {

bool has_index(const FeatureVector& fv, std::uint32_t index) {
    return std::any_of(fv.entries.begin(), fv.entries.end(),
                       [&](const auto& e) { return e.first == index; });
}

} // namespace

TEST_CASE("tokenize_and_truncate") {
    CHECK(tokenize_and_truncate("CBC, type and screen", 100) ==
          std::vector<std::string>{"cbc", ",", "type", "and", "screen"});
    CHECK(tokenize_and_truncate("", 10).empty());
    CHECK(tokenize_and_truncate("   ", 10).empty());
    CHECK(tokenize_and_truncate("BP 120/80", 100) ==
          std::vector<std::string>{"bp", "120", "/", "80"});

    SUBCASE("max_tokens=1 keeps the first token") {
        CHECK(tokenize_and_truncate("CBC, type and screen", 1) ==
              std::vector<std::string>{"cbc"});
    }
    SUBCASE("truncation keeps the leading prefix") {
        std::string line;
        for (int i = 0; i < 130; ++i) line += "tok" + std::to_string(i) + " ";
        const auto full = tokenize_and_truncate(line, 1000);
        REQUIRE(full.size() == 130);
        const auto truncated = tokenize_and_truncate(line, 100);
        REQUIRE(truncated.size() == 100);
        CHECK(std::equal(truncated.begin(), truncated.end(), full.begin()));
    }
    CHECK_THROWS_AS(tokenize_and_truncate("x", 0), UsageError);
}

TEST_CASE("fnv1a64 matches the independent oracle") {
    for (const char* s : {"", "uni:allergies", "bi:type|and", "flag:ends-colon", "pos:3"}) {
        CHECK(fnv1a64(s) == oracle::fnv1a64(s));
    }
    // frozen value computed with the independent implementation
    CHECK(fnv1a64("uni:allergies") == 17193617764631339739ull);
    CHECK(feature_index("uni:allergies", std::size_t{1} << 20) == 156379u);
}

TEST_CASE("extract_features") {
    const FeatureConfig config{std::size_t{1} << 20, 100};

    SUBCASE("empty line is bias plus flags and position only") {
        const FeatureVector fv = extract_features("", 0, 1, config);
        CHECK(has_index(fv, 0));
        // bias, short-line flag, position bucket
        CHECK(fv.entries.size() == 3);
        CHECK(has_index(fv, feature_index("flag:short", config.feature_space_size)));
        CHECK(has_index(fv, feature_index("pos:0", config.feature_space_size)));
    }
    SUBCASE("ends-with-colon indicator") {
        const FeatureVector fv = extract_features("Allergies:", 0, 4, config);
        CHECK(has_index(fv, feature_index("flag:ends-colon", config.feature_space_size)));
        CHECK(has_index(fv, feature_index("uni:allergies", config.feature_space_size)));
        CHECK_FALSE(has_index(fv, feature_index("flag:digit", config.feature_space_size)));
    }
    SUBCASE("digit, caps-prefix, bigram, trigram") {
        const FeatureVector fv = extract_features("WBC 12 high", 2, 4, config);
        CHECK(has_index(fv, feature_index("flag:digit", config.feature_space_size)));
        CHECK(has_index(fv, feature_index("flag:caps-prefix", config.feature_space_size)));
        CHECK(has_index(fv, feature_index("bi:wbc|12", config.feature_space_size)));
        CHECK(has_index(fv, feature_index("tri:wbc", config.feature_space_size)));
        CHECK(has_index(fv, feature_index("pos:2", config.feature_space_size)));
    }
    SUBCASE("single capital letter is not a caps prefix") {
        const FeatureVector fv = extract_features("A long sentence without shouting", 0, 1,
                                                  config);
        CHECK_FALSE(has_index(fv, feature_index("flag:caps-prefix", config.feature_space_size)));
    }
    SUBCASE("position buckets") {
        for (const auto& [pos, bucket] :
             std::vector<std::pair<std::size_t, const char*>>{
                 {0, "pos:0"}, {19, "pos:0"}, {20, "pos:1"}, {99, "pos:4"}}) {
            const FeatureVector fv = extract_features("text", pos, 100, config);
            CHECK(has_index(fv, feature_index(bucket, config.feature_space_size)));
        }
    }
    SUBCASE("purity and sorted unique indices") {
        const FeatureVector a = extract_features("Pt stable, will monitor.", 3, 9, config);
        const FeatureVector b = extract_features("Pt stable, will monitor.", 3, 9, config);
        CHECK(a.entries == b.entries);
        for (std::size_t i = 1; i < a.entries.size(); ++i) {
            CHECK(a.entries[i - 1].first < a.entries[i].first);
        }
    }
    SUBCASE("repeated tokens accumulate weight") {
        const FeatureVector fv = extract_features("cbc cbc cbc cbc cbc", 0, 1, config);
        const std::uint32_t index = feature_index("uni:cbc", config.feature_space_size);
        const auto it = std::find_if(fv.entries.begin(), fv.entries.end(),
                                     [&](const auto& e) { return e.first == index; });
        REQUIRE(it != fv.entries.end());
        CHECK(it->second == doctest::Approx(5.0));
    }
    SUBCASE("hash index 0 is reserved for bias") {
        // every produced index is either the bias entry or nonzero
        const FeatureVector fv = extract_features("some generic words here", 0, 2, config);
        std::size_t zeros = 0;
        for (const auto& [index, weight] : fv.entries) {
            if (index == 0) ++zeros;
        }
        CHECK(zeros == 1);
    }
    CHECK_THROWS_AS(extract_features("x", 5, 5, config), UsageError);
}
