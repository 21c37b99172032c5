#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sectionseg {

struct FeatureConfig {
    std::size_t feature_space_size = std::size_t{1} << 20;
    std::size_t max_tokens = 100;
};

// Sparse feature vector; entries sorted by index, indices unique (colliding
// features accumulate into one entry). Index 0 is the bias.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
};

// Maximal ASCII-alphanumeric runs (lowercased) or single punctuation marks,
// keeping the first max_tokens.
std::vector<std::string> tokenize_and_truncate(std::string_view line, std::size_t max_tokens);

// Index of a namespaced feature string: FNV-1a 64 reduced modulo the feature
// space, with 0 remapped to 1 (bias owns index 0).
std::uint32_t feature_index(std::string_view feature, std::size_t feature_space_size);

// Bias, hashed token unigrams/bigrams, hashed char 3-grams over the truncated
// token stream, and binary indicators (ends-with-colon, all-caps prefix,
// contains-digit, short-line, 5-bucket relative position).
FeatureVector extract_features(std::string_view line, std::size_t position_in_note,
                               std::size_t note_length, const FeatureConfig& config);

} // namespace sectionseg
