#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sectionseg/labels.hpp"

namespace sectionseg {

// Character span of one section in a note's raw text; [start, end).
struct SectionSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;
};

// A note as ingested: raw text plus its validated section spans.
struct SpanAnnotatedNote {
    std::string note_id;
    std::optional<std::string> category;
    std::string text;
    std::vector<SectionSpan> spans;
};

struct Note {
    std::string note_id;
    std::optional<std::string> category;
    std::vector<std::string> lines;
};

struct LabeledNote {
    std::string note_id;
    std::vector<std::string> lines;
    std::vector<std::string> labels; // bare slugs, |labels| == |lines|
};

struct FrequencyRow {
    std::string label;
    std::size_t span_count = 0;
    double overall_percent = 0.0; // rounded half-up to 2 decimals
};

struct FrequencyReport {
    std::vector<FrequencyRow> rows; // count desc, then slug asc; "<none>" excluded
    std::size_t total_spans = 0;
};

struct ExclusionReport {
    std::map<std::string, std::size_t> excluded_per_label;
    std::size_t total_excluded = 0;
};

// One (line, gold label) pair pooled out of a note; keeps enough origin
// context for position features.
struct LineExample {
    std::string text;
    std::string label;
    std::size_t position = 0;
    std::size_t note_length = 1;
};

// A line plus its character range [begin, end) in the raw text it came from.
struct LineSpan {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

double round_half_up_2(double value);

// Splits on newlines, then at sentence-final punctuation (. ! ?) followed by
// whitespace and an uppercase letter or digit. Fragments are trimmed and
// empty ones dropped. Offsets address the original text.
std::vector<LineSpan> split_into_line_spans(std::string_view raw_text);
std::vector<std::string> split_into_lines(std::string_view raw_text);

// Checks span bounds, pairwise disjointness, label membership, and that
// masked-PHI tokens (<DATE>, <NAME>, ...) are well formed. Throws
// OverlappingSpans / UnknownLabel / MalformedInput.
void validate_note(const SpanAnnotatedNote& note, const LabelSet& label_set);

// Each line takes the label of the span containing its character midpoint;
// lines outside all spans get "<none>". Calls validate_note first.
LabeledNote project_spans_to_lines(const SpanAnnotatedNote& note, const LabelSet& label_set);

LabeledNote consolidate_labels(const LabeledNote& note,
                               const std::map<std::string, std::string>& mapping);

std::pair<std::vector<LabeledNote>, ExclusionReport>
restrict_label_set(const std::vector<LabeledNote>& dataset, const LabelSet& allowed);

// Pools lines across notes, shuffles with the shipped PRNG, and splits at
// floor(fraction * N).
std::pair<std::vector<LineExample>, std::vector<LineExample>>
split_line_level(const std::vector<LabeledNote>& dataset, double train_fraction,
                 std::uint64_t seed);

std::vector<LabeledNote> filter_notes_by_length(std::vector<LabeledNote> dataset,
                                                std::size_t max_lines);
std::vector<Note> filter_notes_by_length(std::vector<Note> dataset, std::size_t max_lines);

FrequencyReport corpus_stats(const std::vector<SpanAnnotatedNote>& dataset);

Note to_note(const LabeledNote& note);

} // namespace sectionseg
