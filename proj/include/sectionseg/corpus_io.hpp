#pragma once

#include <map>
#include <string>
#include <vector>

#include "sectionseg/corpus.hpp"
#include "sectionseg/evaluation.hpp"
#include "sectionseg/hallucination.hpp"
#include "sectionseg/labels.hpp"
#include "sectionseg/segmenter.hpp"

namespace sectionseg {

// Span-annotated note JSONL:
//   {"note_id": str, "category": str|null, "text": str,
//    "spans": [{"start": int, "end": int, "label": str}]}
std::vector<SpanAnnotatedNote> read_span_jsonl(const std::string& path);
void write_span_jsonl(const std::string& path, const std::vector<SpanAnnotatedNote>& notes);

// Line-level JSONL: {"note_id": str, "lines": [str], "labels": [str]} where
// serialized labels are "<none>" or "I_<slug>"; in memory the prefix is
// stripped. Labels are validated against the set when one is given.
std::vector<LabeledNote> read_line_jsonl(const std::string& path,
                                         const LabelSet* label_set = nullptr);
void write_line_jsonl(const std::string& path, const std::vector<LabeledNote>& notes);

std::string to_io_tag(const std::string& slug);
std::string from_io_tag(const std::string& tag);

// Label-set file: one slug per line; the set name is the file stem.
LabelSet read_label_set(const std::string& path);

// Consolidation map: two-column TSV, from<TAB>to.
std::map<std::string, std::string> read_consolidation_map(const std::string& path);

// Predictions JSONL: {"note_id": str, "engine": str, "predictions": [str]}
// with bare slugs and "<none>".
std::vector<NotePredictions> read_predictions_jsonl(const std::string& path);
void write_predictions_jsonl(const std::string& path,
                             const std::vector<NotePredictions>& predictions);

// Per-note score JSONL: {"note_id": str, "macro_f1": num, "weighted_f1": num}.
std::vector<NoteScore> read_note_scores_jsonl(const std::string& path);
void write_note_scores_jsonl(const std::string& path, const std::vector<NoteScore>& scores);

// Correction cache JSONL:
//   {"invalid": str, "label_set": str, "mapped_to": str, "method": str}.
CorrectionCache read_correction_cache(const std::string& path); // missing file = empty cache
void write_correction_cache(const std::string& path, const CorrectionCache& cache);

// Run log JSONL: {"note_id", "family", "prompt_sha256", "raw_completion",
// "diagnostics"}; raw completions are always persisted.
void write_run_log(const std::string& path, const std::vector<SegmentOutcome>& outcomes,
                   const std::string& family);

} // namespace sectionseg
