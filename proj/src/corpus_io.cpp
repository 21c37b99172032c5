#include "sectionseg/corpus_io.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sectionseg/errors.hpp"

namespace sectionseg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

// Applies fn to each non-blank line, reporting 1-based record numbers on
// parse failures.
template <typename Fn>
void for_each_record(const std::string& path, Fn&& fn) {
    std::ifstream in = open_for_read(path);
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++record;
        ordered_json parsed;
        try {
            parsed = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("'" + path + "': malformed JSON at record " +
                            std::to_string(record) + ": " + e.what());
        }
        try {
            fn(parsed, record);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("'" + path + "': record " + std::to_string(record) +
                            " has unexpected shape: " + e.what());
        }
    }
}

} // namespace

std::vector<SpanAnnotatedNote> read_span_jsonl(const std::string& path) {
    std::vector<SpanAnnotatedNote> notes;
    for_each_record(path, [&](const ordered_json& record, std::size_t) {
        SpanAnnotatedNote note;
        note.note_id = record.at("note_id").get<std::string>();
        if (record.contains("category") && !record.at("category").is_null()) {
            note.category = record.at("category").get<std::string>();
        }
        note.text = record.at("text").get<std::string>();
        for (const auto& span : record.at("spans")) {
            note.spans.push_back(SectionSpan{span.at("start").get<std::size_t>(),
                                             span.at("end").get<std::size_t>(),
                                             span.at("label").get<std::string>()});
        }
        notes.push_back(std::move(note));
    });
    return notes;
}

void write_span_jsonl(const std::string& path, const std::vector<SpanAnnotatedNote>& notes) {
    std::ofstream out = open_for_write(path);
    for (const SpanAnnotatedNote& note : notes) {
        ordered_json record;
        record["note_id"] = note.note_id;
        record["category"] = note.category.has_value() ? ordered_json(*note.category)
                                                       : ordered_json(nullptr);
        record["text"] = note.text;
        record["spans"] = ordered_json::array();
        for (const SectionSpan& span : note.spans) {
            record["spans"].push_back(
                {{"start", span.start}, {"end", span.end}, {"label", span.label}});
        }
        out << record.dump() << '\n';
    }
}

std::string to_io_tag(const std::string& slug) {
    return slug == kOutsideLabel ? slug : "I_" + slug;
}

std::string from_io_tag(const std::string& tag) {
    if (tag == kOutsideLabel) return tag;
    if (tag.rfind("I_", 0) == 0) return tag.substr(2);
    throw DataError("line label '" + tag + "' is neither '<none>' nor an I_ tag");
}

std::vector<LabeledNote> read_line_jsonl(const std::string& path, const LabelSet* label_set) {
    std::vector<LabeledNote> notes;
    for_each_record(path, [&](const ordered_json& record, std::size_t record_number) {
        LabeledNote note;
        note.note_id = record.at("note_id").get<std::string>();
        note.lines = record.at("lines").get<std::vector<std::string>>();
        for (const auto& tag : record.at("labels")) {
            note.labels.push_back(from_io_tag(tag.get<std::string>()));
        }
        if (note.lines.size() != note.labels.size()) {
            throw DataError("'" + path + "': record " + std::to_string(record_number) +
                            " (note '" + note.note_id + "') has " +
                            std::to_string(note.lines.size()) + " lines but " +
                            std::to_string(note.labels.size()) + " labels");
        }
        if (label_set != nullptr) {
            for (const std::string& label : note.labels) {
                if (!label_set->contains(label)) {
                    throw UnknownLabel("'" + path + "': record " +
                                       std::to_string(record_number) + " label '" + label +
                                       "' not in label set '" + label_set->name() + "'");
                }
            }
        }
        notes.push_back(std::move(note));
    });
    return notes;
}

void write_line_jsonl(const std::string& path, const std::vector<LabeledNote>& notes) {
    std::ofstream out = open_for_write(path);
    for (const LabeledNote& note : notes) {
        ordered_json record;
        record["note_id"] = note.note_id;
        record["lines"] = note.lines;
        ordered_json tags = ordered_json::array();
        for (const std::string& label : note.labels) tags.push_back(to_io_tag(label));
        record["labels"] = std::move(tags);
        out << record.dump() << '\n';
    }
}

LabelSet read_label_set(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) labels.push_back(line);
    }
    return LabelSet(std::filesystem::path(path).stem().string(), std::move(labels));
}

std::map<std::string, std::string> read_consolidation_map(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::map<std::string, std::string> mapping;
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        while (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++record;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("'" + path + "': record " + std::to_string(record) +
                            " is not two tab-separated columns");
        }
        const std::string from = line.substr(0, tab);
        const std::string to = line.substr(tab + 1);
        if (!is_valid_slug(from) || !is_valid_slug(to)) {
            throw DataError("'" + path + "': record " + std::to_string(record) +
                            " has a non-slug column");
        }
        mapping[from] = to;
    }
    return mapping;
}

std::vector<NotePredictions> read_predictions_jsonl(const std::string& path) {
    std::vector<NotePredictions> predictions;
    for_each_record(path, [&](const ordered_json& record, std::size_t) {
        NotePredictions p;
        p.note_id = record.at("note_id").get<std::string>();
        p.engine = record.at("engine").get<std::string>();
        p.labels = record.at("predictions").get<std::vector<std::string>>();
        predictions.push_back(std::move(p));
    });
    return predictions;
}

void write_predictions_jsonl(const std::string& path,
                             const std::vector<NotePredictions>& predictions) {
    std::ofstream out = open_for_write(path);
    for (const NotePredictions& p : predictions) {
        ordered_json record;
        record["note_id"] = p.note_id;
        record["engine"] = p.engine;
        record["predictions"] = p.labels;
        out << record.dump() << '\n';
    }
}

std::vector<NoteScore> read_note_scores_jsonl(const std::string& path) {
    std::vector<NoteScore> scores;
    for_each_record(path, [&](const ordered_json& record, std::size_t) {
        scores.push_back(NoteScore{record.at("note_id").get<std::string>(),
                                   record.at("macro_f1").get<double>(),
                                   record.at("weighted_f1").get<double>()});
    });
    return scores;
}

void write_note_scores_jsonl(const std::string& path, const std::vector<NoteScore>& scores) {
    std::ofstream out = open_for_write(path);
    for (const NoteScore& score : scores) {
        ordered_json record;
        record["note_id"] = score.note_id;
        record["macro_f1"] = score.macro_f1;
        record["weighted_f1"] = score.weighted_f1;
        out << record.dump() << '\n';
    }
}

CorrectionCache read_correction_cache(const std::string& path) {
    CorrectionCache cache;
    if (!std::filesystem::exists(path)) return cache;
    for_each_record(path, [&](const ordered_json& record, std::size_t) {
        cache.entries[{record.at("invalid").get<std::string>(),
                       record.at("label_set").get<std::string>()}] =
            CorrectionCache::Entry{record.at("mapped_to").get<std::string>(),
                                   record.at("method").get<std::string>()};
    });
    return cache;
}

void write_correction_cache(const std::string& path, const CorrectionCache& cache) {
    std::ofstream out = open_for_write(path);
    for (const auto& [key, entry] : cache.entries) {
        ordered_json record;
        record["invalid"] = key.first;
        record["label_set"] = key.second;
        record["mapped_to"] = entry.mapped_to;
        record["method"] = entry.method;
        out << record.dump() << '\n';
    }
}

void write_run_log(const std::string& path, const std::vector<SegmentOutcome>& outcomes,
                   const std::string& family) {
    std::ofstream out = open_for_write(path);
    for (const SegmentOutcome& outcome : outcomes) {
        ordered_json record;
        record["note_id"] = outcome.note_id;
        record["family"] = family;
        record["prompt_sha256"] = outcome.prompt_sha256;
        record["raw_completion"] = outcome.raw_completion;
        ordered_json diagnostics;
        if (outcome.prediction.has_value()) {
            const ParseDiagnostics& d = outcome.prediction->diagnostics;
            diagnostics["parsed_count"] = d.parsed_count;
            diagnostics["expected_count"] = d.expected_count;
            diagnostics["padded"] = d.padded;
            diagnostics["truncated"] = d.truncated;
            diagnostics["order_violations"] = d.order_violations;
            diagnostics["unparseable_lines"] = d.unparseable_lines;
        } else {
            diagnostics["error"] = outcome.error;
        }
        record["diagnostics"] = std::move(diagnostics);
        out << record.dump() << '\n';
    }
}

} // namespace sectionseg
