#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sectionseg/corpus.hpp"
#include "sectionseg/hallucination.hpp"

namespace sectionseg {

enum class ErrorCategory { omission, label_confusion, valid_local_interpretation, other };

std::string to_string(ErrorCategory category);

struct ErrorRecord {
    std::string note_id;
    std::size_t line_index = 0;
    std::string gold;
    std::string predicted;
    ErrorCategory category = ErrorCategory::other;
};

struct ErrorBreakdown {
    std::size_t omission = 0;
    std::size_t label_confusion = 0;
    std::size_t valid_local_interpretation = 0;
    std::size_t other = 0;
    std::vector<ErrorRecord> records;
    bool rule_only = false; // no classifier available: non-omissions land in other
};

// Hook for the error-classification LLM: given the line text and the two
// labels, returns one of "label_confusion", "valid_local_interpretation",
// "other" (non-compliant replies degrade to other).
using ErrorClassifier = std::function<std::optional<std::string>(
    const std::string& line, const std::string& gold, const std::string& predicted)>;

// Partitions mismatched lines into the four categories. Omission (gold is a
// real section, predicted "<none>") is rule-based; the rest go through the
// classifier when present.
ErrorBreakdown categorize_errors(const std::vector<LabeledNote>& gold,
                                 const std::vector<NotePredictions>& predictions,
                                 const ErrorClassifier& classifier);

} // namespace sectionseg
