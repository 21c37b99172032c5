#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sectionseg/chat_client.hpp"
#include "sectionseg/corpus.hpp"
#include "sectionseg/labels.hpp"
#include "sectionseg/prompt.hpp"

namespace sectionseg {

struct ParseDiagnostics {
    std::size_t parsed_count = 0;
    std::size_t expected_count = 0;
    std::size_t padded = 0;
    std::size_t truncated = 0;
    std::size_t order_violations = 0; // parsed line numbers that went backwards
    std::vector<std::string> unparseable_lines;
};

struct ParsedPrediction {
    std::string note_id;
    std::vector<std::string> labels; // normalized headers, pre-validation
    ParseDiagnostics diagnostics;
};

// Extracts every "Line <n>: <header>" match in order of appearance ("line"
// case-insensitive, bullets and preamble on the same line tolerated); headers
// are normalized with normalize_header. Completion lines without a match are
// recorded. Throws NoParsableLines when nothing matches.
ParsedPrediction parse_predictions(std::string_view raw, std::size_t expected_count);

// Truncates or pads with "<none>" until |labels| == expected_count.
ParsedPrediction reconcile_length(ParsedPrediction parsed, std::size_t expected_count);

struct SegmentOutcome {
    std::string note_id;
    std::optional<ParsedPrediction> prediction; // absent when the note failed
    std::string error;                          // failure description
    std::string raw_completion;
    std::string prompt_sha256;
    int retries = 0;
};

// Full zero-shot pipeline per note: build_prompt, request_completion (one
// automatic re-prompt on NoParsableLines), parse, reconcile. Failures are
// per-note records, never fatal to the batch; outcomes align with input
// order. At most config.max_in_flight notes are in flight at once.
std::vector<SegmentOutcome> segment_with_llm(const CompletionClientConfig& config,
                                             const std::vector<Note>& notes,
                                             const LabelSet& label_set, PromptFamily family);

} // namespace sectionseg
