#include "sectionseg/evaluation.hpp"

#include <map>

#include "sectionseg/errors.hpp"

namespace sectionseg {

void accumulate_confusion(ConfusionCounts& counts, const std::vector<std::string>& gold,
                          const std::vector<std::string>& predicted, const LabelSet& label_set) {
    if (gold.size() != predicted.size()) {
        throw LengthMismatch("confusion_counts: gold has " + std::to_string(gold.size()) +
                             " lines, predictions have " + std::to_string(predicted.size()));
    }
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const int gold_index = label_set.index_of(gold[i]);
        if (gold_index < 0) {
            throw UnknownLabel("confusion_counts: gold label '" + gold[i] +
                               "' not in label set '" + label_set.name() + "'");
        }
        ++counts.total_lines;
        ++counts.support[static_cast<std::size_t>(gold_index)];
        const int predicted_index = label_set.index_of(predicted[i]);
        if (predicted_index == gold_index) {
            ++counts.true_positive[static_cast<std::size_t>(gold_index)];
        } else {
            ++counts.false_negative[static_cast<std::size_t>(gold_index)];
            if (predicted_index >= 0) {
                ++counts.false_positive[static_cast<std::size_t>(predicted_index)];
            } else {
                ++counts.invalid_predictions;
            }
        }
    }
}

ConfusionCounts confusion_counts(const std::vector<std::string>& gold,
                                 const std::vector<std::string>& predicted,
                                 const LabelSet& label_set) {
    ConfusionCounts counts(label_set.size());
    accumulate_confusion(counts, gold, predicted, label_set);
    return counts;
}

namespace {

double ratio(std::size_t numerator, std::size_t denominator) {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
}

} // namespace

MetricsReport prf_metrics(const ConfusionCounts& counts, const LabelSet& label_set,
                          MacroPolicy policy) {
    MetricsReport report;
    report.total_lines = counts.total_lines;
    report.invalid_predictions = counts.invalid_predictions;

    std::size_t macro_count = 0;
    std::size_t total_support = 0;
    for (std::size_t y = 0; y < label_set.size(); ++y) {
        PerLabelMetrics m;
        m.label = label_set.label_at(y);
        m.support = counts.support[y];
        m.precision = ratio(counts.true_positive[y],
                            counts.true_positive[y] + counts.false_positive[y]);
        m.recall = ratio(counts.true_positive[y],
                         counts.true_positive[y] + counts.false_negative[y]);
        m.f1 = (m.precision + m.recall) == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        report.per_label.push_back(m);

        const bool in_macro = policy == MacroPolicy::all_labels || m.support > 0;
        if (in_macro) {
            report.macro_precision += m.precision;
            report.macro_recall += m.recall;
            report.macro_f1 += m.f1;
            ++macro_count;
        }
        total_support += m.support;
    }
    if (macro_count > 0) {
        report.macro_precision /= static_cast<double>(macro_count);
        report.macro_recall /= static_cast<double>(macro_count);
        report.macro_f1 /= static_cast<double>(macro_count);
    }
    if (total_support > 0) {
        for (const PerLabelMetrics& m : report.per_label) {
            const double weight =
                static_cast<double>(m.support) / static_cast<double>(total_support);
            report.weighted_precision += weight * m.precision;
            report.weighted_recall += weight * m.recall;
            report.weighted_f1 += weight * m.f1;
        }
    }
    return report;
}

std::vector<NoteScore> per_note_scores(const std::vector<LabeledNote>& gold,
                                       const std::vector<NotePredictions>& predictions,
                                       const LabelSet& label_set) {
    std::map<std::string, const NotePredictions*> by_id;
    for (const NotePredictions& p : predictions) by_id[p.note_id] = &p;

    std::vector<NoteScore> scores;
    scores.reserve(gold.size());
    for (const LabeledNote& note : gold) {
        const auto it = by_id.find(note.note_id);
        if (it == by_id.end()) {
            throw DataError("per_note_scores: no predictions for note '" + note.note_id + "'");
        }
        const ConfusionCounts counts =
            confusion_counts(note.labels, it->second->labels, label_set);
        const MetricsReport report =
            prf_metrics(counts, label_set, MacroPolicy::gold_support_only);
        scores.push_back(NoteScore{note.note_id, report.macro_f1, report.weighted_f1});
    }
    return scores;
}

} // namespace sectionseg
