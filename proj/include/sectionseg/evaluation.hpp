#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sectionseg/corpus.hpp"
#include "sectionseg/hallucination.hpp"
#include "sectionseg/labels.hpp"

namespace sectionseg {

// Per-label tallies in label-set order. Predictions outside the label set
// count as false negatives for the gold label and accumulate in the invalid
// bucket; they never form a class of their own.
struct ConfusionCounts {
    std::vector<std::size_t> true_positive;
    std::vector<std::size_t> false_positive;
    std::vector<std::size_t> false_negative;
    std::vector<std::size_t> support;
    std::size_t invalid_predictions = 0;
    std::size_t total_lines = 0;

    explicit ConfusionCounts(std::size_t num_labels = 0)
        : true_positive(num_labels), false_positive(num_labels), false_negative(num_labels),
          support(num_labels) {}
};

void accumulate_confusion(ConfusionCounts& counts, const std::vector<std::string>& gold,
                          const std::vector<std::string>& predicted, const LabelSet& label_set);

ConfusionCounts confusion_counts(const std::vector<std::string>& gold,
                                 const std::vector<std::string>& predicted,
                                 const LabelSet& label_set);

struct PerLabelMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

// Which labels enter the macro average.
enum class MacroPolicy { gold_support_only, all_labels };

struct MetricsReport {
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    std::size_t total_lines = 0;
    std::size_t invalid_predictions = 0;
    std::vector<PerLabelMetrics> per_label;
};

// Zero-division convention: 0/0 = 0 for P, R, and F1.
MetricsReport prf_metrics(const ConfusionCounts& counts, const LabelSet& label_set,
                          MacroPolicy policy = MacroPolicy::gold_support_only);

struct NoteScore {
    std::string note_id;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
};

// Metrics within each note independently; macro averages over the labels
// with gold support in that note. Predictions are joined to gold by note_id.
std::vector<NoteScore> per_note_scores(const std::vector<LabeledNote>& gold,
                                       const std::vector<NotePredictions>& predictions,
                                       const LabelSet& label_set);

} // namespace sectionseg
