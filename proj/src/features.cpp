#include "sectionseg/features.hpp"

#include <algorithm>

#include "sectionseg/errors.hpp"
#include "sectionseg/hash.hpp"

namespace sectionseg {

namespace {

// Locale-free ASCII classification.
bool ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

void add(std::vector<std::pair<std::uint32_t, double>>& entries, std::string_view feature,
         std::size_t space) {
    entries.emplace_back(feature_index(feature, space), 1.0);
}

} // namespace

std::vector<std::string> tokenize_and_truncate(std::string_view line, std::size_t max_tokens) {
    if (max_tokens < 1) throw UsageError("tokenize_and_truncate: max_tokens must be >= 1");
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size() && tokens.size() < max_tokens) {
        const char c = line[i];
        if (ascii_space(c)) {
            ++i;
        } else if (ascii_alnum(c)) {
            std::string token;
            while (i < line.size() && ascii_alnum(line[i])) {
                token.push_back(ascii_lower(line[i]));
                ++i;
            }
            tokens.push_back(std::move(token));
        } else {
            tokens.push_back(std::string(1, c));
            ++i;
        }
    }
    return tokens;
}

std::uint32_t feature_index(std::string_view feature, std::size_t feature_space_size) {
    const std::uint64_t reduced = fnv1a64(feature) % feature_space_size;
    return reduced == 0 ? 1u : static_cast<std::uint32_t>(reduced);
}

FeatureVector extract_features(std::string_view line, std::size_t position_in_note,
                               std::size_t note_length, const FeatureConfig& config) {
    if (note_length == 0 || position_in_note >= note_length) {
        throw UsageError("extract_features: position must be < note_length");
    }
    const std::size_t space = config.feature_space_size;
    std::vector<std::pair<std::uint32_t, double>> entries;
    entries.emplace_back(0u, 1.0); // bias

    const std::vector<std::string> tokens = tokenize_and_truncate(line, config.max_tokens);

    std::string scratch;
    for (const std::string& token : tokens) {
        scratch = "uni:";
        scratch += token;
        add(entries, scratch, space);
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        scratch = "bi:";
        scratch += tokens[i];
        scratch += '|';
        scratch += tokens[i + 1];
        add(entries, scratch, space);
    }

    // Character 3-grams over the truncated token stream, space-joined.
    std::string joined;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) joined += ' ';
        joined += tokens[i];
    }
    for (std::size_t i = 0; i + 3 <= joined.size(); ++i) {
        scratch = "tri:";
        scratch += joined.substr(i, 3);
        add(entries, scratch, space);
    }

    std::string_view trimmed = line;
    while (!trimmed.empty() && ascii_space(trimmed.back())) trimmed.remove_suffix(1);
    while (!trimmed.empty() && ascii_space(trimmed.front())) trimmed.remove_prefix(1);
    if (!trimmed.empty() && trimmed.back() == ':') add(entries, "flag:ends-colon", space);

    // All-caps prefix: first alphabetic run is uppercase and at least 2 chars.
    std::size_t alpha_begin = 0;
    while (alpha_begin < trimmed.size() &&
           !((trimmed[alpha_begin] >= 'a' && trimmed[alpha_begin] <= 'z') ||
             (trimmed[alpha_begin] >= 'A' && trimmed[alpha_begin] <= 'Z'))) {
        ++alpha_begin;
    }
    std::size_t alpha_end = alpha_begin;
    bool all_upper = true;
    while (alpha_end < trimmed.size() &&
           ((trimmed[alpha_end] >= 'a' && trimmed[alpha_end] <= 'z') ||
            (trimmed[alpha_end] >= 'A' && trimmed[alpha_end] <= 'Z'))) {
        all_upper = all_upper && trimmed[alpha_end] >= 'A' && trimmed[alpha_end] <= 'Z';
        ++alpha_end;
    }
    if (all_upper && alpha_end - alpha_begin >= 2) add(entries, "flag:caps-prefix", space);

    if (std::any_of(trimmed.begin(), trimmed.end(),
                    [](char c) { return c >= '0' && c <= '9'; })) {
        add(entries, "flag:digit", space);
    }
    if (tokens.size() < 4) add(entries, "flag:short", space);

    const std::size_t bucket =
        std::min<std::size_t>(4, 5 * position_in_note / note_length);
    scratch = "pos:";
    scratch += static_cast<char>('0' + bucket);
    add(entries, scratch, space);

    // Merge colliding indices.
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    FeatureVector out;
    out.entries.reserve(entries.size());
    for (const auto& [index, weight] : entries) {
        if (!out.entries.empty() && out.entries.back().first == index) {
            out.entries.back().second += weight;
        } else {
            out.entries.emplace_back(index, weight);
        }
    }
    return out;
}

} // namespace sectionseg
