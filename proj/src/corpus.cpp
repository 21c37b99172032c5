#include "sectionseg/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sectionseg/errors.hpp"
#include "sectionseg/rng.hpp"

namespace sectionseg {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_upper(char c) {
    return c >= 'A' && c <= 'Z';
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool sentence_final(char c) {
    return c == '.' || c == '!' || c == '?';
}

// Emits [begin, end) trimmed of surrounding whitespace; skips all-blank runs.
void push_trimmed(std::string_view raw, std::size_t begin, std::size_t end,
                  std::vector<LineSpan>& out) {
    while (begin < end && is_space(raw[begin])) ++begin;
    while (end > begin && is_space(raw[end - 1])) --end;
    if (begin == end) return;
    out.push_back(LineSpan{std::string(raw.substr(begin, end - begin)), begin, end});
}

} // namespace

double round_half_up_2(double value) {
    return std::floor(value * 100.0 + 0.5) / 100.0;
}

std::vector<LineSpan> split_into_line_spans(std::string_view raw_text) {
    std::vector<LineSpan> lines;
    std::size_t fragment_begin = 0;
    for (std::size_t i = 0; i <= raw_text.size(); ++i) {
        const bool at_end = i == raw_text.size();
        if (!at_end && raw_text[i] != '\n') continue;
        // Within the fragment, break after sentence-final punctuation that is
        // followed by whitespace and an uppercase letter or digit.
        std::size_t piece_begin = fragment_begin;
        for (std::size_t j = fragment_begin; j < i; ++j) {
            if (!sentence_final(raw_text[j])) continue;
            std::size_t k = j + 1;
            while (k < i && is_space(raw_text[k])) ++k;
            if (k == j + 1 || k >= i) continue; // no whitespace gap or fragment ends
            if (is_upper(raw_text[k]) || is_digit(raw_text[k])) {
                push_trimmed(raw_text, piece_begin, j + 1, lines);
                piece_begin = k;
                j = k - 1;
            }
        }
        push_trimmed(raw_text, piece_begin, i, lines);
        fragment_begin = i + 1;
    }
    return lines;
}

std::vector<std::string> split_into_lines(std::string_view raw_text) {
    std::vector<std::string> lines;
    for (auto& span : split_into_line_spans(raw_text)) {
        lines.push_back(std::move(span.text));
    }
    return lines;
}

void validate_note(const SpanAnnotatedNote& note, const LabelSet& label_set) {
    for (const SectionSpan& span : note.spans) {
        if (span.start >= span.end || span.end > note.text.size()) {
            throw MalformedInput("note '" + note.note_id + "': span [" +
                                 std::to_string(span.start) + ", " + std::to_string(span.end) +
                                 ") out of bounds for text of length " +
                                 std::to_string(note.text.size()));
        }
        if (!label_set.contains(span.label)) {
            throw UnknownLabel("note '" + note.note_id + "': span label '" + span.label +
                               "' not in label set '" + label_set.name() + "'");
        }
    }
    std::vector<const SectionSpan*> ordered;
    ordered.reserve(note.spans.size());
    for (const SectionSpan& span : note.spans) ordered.push_back(&span);
    std::sort(ordered.begin(), ordered.end(),
              [](const SectionSpan* a, const SectionSpan* b) { return a->start < b->start; });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i - 1]->end > ordered[i]->start) {
            throw OverlappingSpans("note '" + note.note_id + "': spans [" +
                                   std::to_string(ordered[i - 1]->start) + ", " +
                                   std::to_string(ordered[i - 1]->end) + ") and [" +
                                   std::to_string(ordered[i]->start) + ", " +
                                   std::to_string(ordered[i]->end) + ") overlap");
        }
    }
    // Masked-PHI tokens: a '<' directly followed by an uppercase run must
    // close with '>' before any whitespace.
    const std::string& text = note.text;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '<' || i + 1 >= text.size() || !is_upper(text[i + 1])) continue;
        std::size_t j = i + 1;
        while (j < text.size() && (is_upper(text[j]) || text[j] == '_')) ++j;
        if (j >= text.size() || text[j] != '>') {
            throw MalformedInput("note '" + note.note_id +
                                 "': malformed masked token at offset " + std::to_string(i));
        }
        i = j;
    }
}

LabeledNote project_spans_to_lines(const SpanAnnotatedNote& note, const LabelSet& label_set) {
    validate_note(note, label_set);
    std::vector<SectionSpan> ordered = note.spans;
    std::sort(ordered.begin(), ordered.end(),
              [](const SectionSpan& a, const SectionSpan& b) { return a.start < b.start; });

    LabeledNote out;
    out.note_id = note.note_id;
    for (const LineSpan& line : split_into_line_spans(note.text)) {
        const std::size_t midpoint = (line.begin + line.end) / 2;
        std::string label(kOutsideLabel);
        for (const SectionSpan& span : ordered) {
            if (span.start > midpoint) break;
            if (midpoint < span.end) {
                label = span.label;
                break;
            }
        }
        out.lines.push_back(line.text);
        out.labels.push_back(std::move(label));
    }
    return out;
}

LabeledNote consolidate_labels(const LabeledNote& note,
                               const std::map<std::string, std::string>& mapping) {
    LabeledNote out = note;
    for (std::string& label : out.labels) {
        const auto it = mapping.find(label);
        if (it != mapping.end()) label = it->second;
    }
    return out;
}

std::pair<std::vector<LabeledNote>, ExclusionReport>
restrict_label_set(const std::vector<LabeledNote>& dataset, const LabelSet& allowed) {
    std::vector<LabeledNote> kept;
    ExclusionReport report;
    for (const LabeledNote& note : dataset) {
        LabeledNote filtered;
        filtered.note_id = note.note_id;
        for (std::size_t i = 0; i < note.lines.size(); ++i) {
            if (allowed.contains(note.labels[i])) {
                filtered.lines.push_back(note.lines[i]);
                filtered.labels.push_back(note.labels[i]);
            } else {
                ++report.excluded_per_label[note.labels[i]];
                ++report.total_excluded;
            }
        }
        if (!filtered.lines.empty()) kept.push_back(std::move(filtered));
    }
    return {std::move(kept), std::move(report)};
}

std::pair<std::vector<LineExample>, std::vector<LineExample>>
split_line_level(const std::vector<LabeledNote>& dataset, double train_fraction,
                 std::uint64_t seed) {
    if (dataset.empty()) throw EmptyTrainingSet("split_line_level: empty dataset");
    if (!(train_fraction > 0.0) || train_fraction > 1.0) {
        throw UsageError("split_line_level: train fraction must be in (0, 1]");
    }
    std::vector<LineExample> pool;
    for (const LabeledNote& note : dataset) {
        for (std::size_t i = 0; i < note.lines.size(); ++i) {
            pool.push_back(LineExample{note.lines[i], note.labels[i], i, note.lines.size()});
        }
    }
    Rng rng = seeded_rng(seed);
    seeded_shuffle(pool, rng);
    const auto train_count =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(pool.size())));
    std::vector<LineExample> train(pool.begin(), pool.begin() + train_count);
    std::vector<LineExample> eval(pool.begin() + train_count, pool.end());
    return {std::move(train), std::move(eval)};
}

namespace {

template <typename NoteT>
std::vector<NoteT> filter_by_length(std::vector<NoteT> dataset, std::size_t max_lines) {
    if (max_lines < 1) throw UsageError("filter_notes_by_length: max_lines must be >= 1");
    std::erase_if(dataset, [&](const NoteT& n) { return n.lines.size() > max_lines; });
    return dataset;
}

} // namespace

std::vector<LabeledNote> filter_notes_by_length(std::vector<LabeledNote> dataset,
                                                std::size_t max_lines) {
    return filter_by_length(std::move(dataset), max_lines);
}

std::vector<Note> filter_notes_by_length(std::vector<Note> dataset, std::size_t max_lines) {
    return filter_by_length(std::move(dataset), max_lines);
}

FrequencyReport corpus_stats(const std::vector<SpanAnnotatedNote>& dataset) {
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (const SpanAnnotatedNote& note : dataset) {
        for (const SectionSpan& span : note.spans) {
            if (span.label == kOutsideLabel) continue;
            ++counts[span.label];
            ++total;
        }
    }
    FrequencyReport report;
    report.total_spans = total;
    for (const auto& [label, count] : counts) {
        const double percent =
            round_half_up_2(100.0 * static_cast<double>(count) / static_cast<double>(total));
        report.rows.push_back(FrequencyRow{label, count, percent});
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const FrequencyRow& a, const FrequencyRow& b) {
                  if (a.span_count != b.span_count) return a.span_count > b.span_count;
                  return a.label < b.label;
              });
    return report;
}

Note to_note(const LabeledNote& note) {
    return Note{note.note_id, std::nullopt, note.lines};
}

} // namespace sectionseg
