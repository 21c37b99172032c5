#include "sectionseg/error_analysis.hpp"

#include <map>

#include "sectionseg/errors.hpp"

namespace sectionseg {

std::string to_string(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::omission: return "omission";
        case ErrorCategory::label_confusion: return "label_confusion";
        case ErrorCategory::valid_local_interpretation: return "valid_local_interpretation";
        case ErrorCategory::other: return "other";
    }
    return "other";
}

namespace {

ErrorCategory parse_category(std::string reply) {
    for (char& c : reply) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == ' ' || c == '-') c = '_';
    }
    // Tolerate surrounding prose by substring match on the canonical names.
    if (reply.find("label_confusion") != std::string::npos) return ErrorCategory::label_confusion;
    if (reply.find("valid_local_interpretation") != std::string::npos) {
        return ErrorCategory::valid_local_interpretation;
    }
    return ErrorCategory::other;
}

} // namespace

ErrorBreakdown categorize_errors(const std::vector<LabeledNote>& gold,
                                 const std::vector<NotePredictions>& predictions,
                                 const ErrorClassifier& classifier) {
    std::map<std::string, const NotePredictions*> by_id;
    for (const NotePredictions& p : predictions) by_id[p.note_id] = &p;

    ErrorBreakdown breakdown;
    breakdown.rule_only = !classifier;
    for (const LabeledNote& note : gold) {
        const auto it = by_id.find(note.note_id);
        if (it == by_id.end()) {
            throw DataError("categorize_errors: no predictions for note '" + note.note_id + "'");
        }
        const NotePredictions& prediction = *it->second;
        if (prediction.labels.size() != note.labels.size()) {
            throw LengthMismatch("categorize_errors: note '" + note.note_id +
                                 "' gold/prediction length mismatch");
        }
        for (std::size_t i = 0; i < note.labels.size(); ++i) {
            if (note.labels[i] == prediction.labels[i]) continue;
            ErrorRecord record{note.note_id, i, note.labels[i], prediction.labels[i],
                               ErrorCategory::other};
            if (note.labels[i] != kOutsideLabel && prediction.labels[i] == kOutsideLabel) {
                record.category = ErrorCategory::omission;
            } else if (classifier) {
                const auto reply = classifier(note.lines[i], note.labels[i], prediction.labels[i]);
                record.category =
                    reply.has_value() ? parse_category(*reply) : ErrorCategory::other;
            }
            switch (record.category) {
                case ErrorCategory::omission: ++breakdown.omission; break;
                case ErrorCategory::label_confusion: ++breakdown.label_confusion; break;
                case ErrorCategory::valid_local_interpretation:
                    ++breakdown.valid_local_interpretation;
                    break;
                case ErrorCategory::other: ++breakdown.other; break;
            }
            breakdown.records.push_back(std::move(record));
        }
    }
    return breakdown;
}

} // namespace sectionseg
