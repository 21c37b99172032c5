#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sectionseg/labels.hpp"

namespace sectionseg {

// Per-note predicted labels, as produced by any engine.
struct NotePredictions {
    std::string note_id;
    std::string engine; // "crf" | "classifier" | "llm"
    std::vector<std::string> labels;
};

struct HallucinationReport {
    std::size_t hallucinated_lines = 0;                 // HL
    std::size_t total_lines = 0;
    std::size_t distinct_headers = 0;                   // HS
    double h_percent = 0.0;                             // 100 * HL / total
    std::map<std::string, std::size_t> per_header_counts;
};

// A line is hallucinated iff its normalized predicted header is outside the
// label set.
HallucinationReport detect_hallucinations(const std::vector<NotePredictions>& predictions,
                                          const LabelSet& label_set);

// Maps an invalid header to the valid label minimizing normalized Levenshtein
// distance between slugs; ties prefer higher hyphen-token overlap, then the
// lexicographically smaller label. Total and deterministic.
std::string fallback_similarity_map(std::string_view invalid, const LabelSet& label_set);

// Hook for the mapping LLM: returns the chosen label text, or nullopt on
// failure. Absence of a client means fallback-only correction.
using MappingClient =
    std::function<std::optional<std::string>(const std::string& invalid_header,
                                             const LabelSet& label_set)>;

struct CorrectionCache {
    struct Entry {
        std::string mapped_to;
        std::string method; // "llm" | "fallback"
    };
    std::map<std::pair<std::string, std::string>, Entry> entries; // (header, set name)
};

// Resolution order: normalization fixed point, then the mapping LLM (reply
// normalized and validated), then the deterministic fallback. The result is
// cached per (header, label-set name).
CorrectionCache::Entry correct_header(const std::string& invalid, const LabelSet& label_set,
                                      const MappingClient& client, CorrectionCache& cache);

struct CorrectionRecord {
    std::string invalid;
    std::string mapped_to;
    std::string method;
    std::size_t count = 0; // corrected lines carrying this header
};

struct CorrectionSummary {
    std::vector<CorrectionRecord> records; // count desc, then header asc
    std::size_t corrected_lines = 0;
    std::string note; // caveat surfaced on every corrected run
};

// Replaces every hallucinated line's header with its correction; valid lines
// pass through untouched. detect_hallucinations on the result reports HL = 0.
std::pair<std::vector<NotePredictions>, CorrectionSummary>
apply_corrections(std::vector<NotePredictions> predictions, const LabelSet& label_set,
                  CorrectionCache& cache, const MappingClient& client);

std::size_t levenshtein_distance(std::string_view a, std::string_view b);

} // namespace sectionseg
