#include "sectionseg/segmenter.hpp"

#include <exception>
#include <thread>

#include "sectionseg/errors.hpp"
#include "sectionseg/hash.hpp"

namespace sectionseg {

namespace {

bool blank(std::string_view text) {
    for (const char c : text) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

// Finds the first "line <digits> :" occurrence; returns the parsed line
// number and the offset just past the colon, or false.
bool find_line_match(std::string_view text, long& line_number, std::size_t& header_begin) {
    for (std::size_t i = 0; i + 4 < text.size(); ++i) {
        const char c0 = text[i];
        if (c0 != 'l' && c0 != 'L') continue;
        const char c1 = text[i + 1], c2 = text[i + 2], c3 = text[i + 3];
        if ((c1 != 'i' && c1 != 'I') || (c2 != 'n' && c2 != 'N') || (c3 != 'e' && c3 != 'E')) {
            continue;
        }
        std::size_t j = i + 4;
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
        if (j >= text.size() || text[j] < '0' || text[j] > '9') continue;
        long number = 0;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') {
            number = number * 10 + (text[j] - '0');
            ++j;
        }
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) ++j;
        if (j >= text.size() || text[j] != ':') continue;
        line_number = number;
        header_begin = j + 1;
        return true;
    }
    return false;
}

} // namespace

ParsedPrediction parse_predictions(std::string_view raw, std::size_t expected_count) {
    ParsedPrediction out;
    out.diagnostics.expected_count = expected_count;

    long previous_number = -1;
    std::size_t begin = 0;
    while (begin <= raw.size()) {
        std::size_t end = raw.find('\n', begin);
        if (end == std::string_view::npos) end = raw.size();
        const std::string_view line = raw.substr(begin, end - begin);

        long number = 0;
        std::size_t header_begin = 0;
        if (find_line_match(line, number, header_begin)) {
            const std::string header = normalize_header(line.substr(header_begin));
            if (!header.empty()) {
                if (number < previous_number) ++out.diagnostics.order_violations;
                previous_number = number;
                out.labels.push_back(header);
            } else if (!blank(line)) {
                out.diagnostics.unparseable_lines.emplace_back(line);
            }
        } else if (!blank(line)) {
            out.diagnostics.unparseable_lines.emplace_back(line);
        }
        begin = end + 1;
    }

    out.diagnostics.parsed_count = out.labels.size();
    if (out.labels.empty()) {
        throw NoParsableLines("no 'Line N: header' matches in completion of " +
                              std::to_string(raw.size()) + " bytes");
    }
    return out;
}

ParsedPrediction reconcile_length(ParsedPrediction parsed, std::size_t expected_count) {
    parsed.diagnostics.expected_count = expected_count;
    if (parsed.labels.size() > expected_count) {
        parsed.diagnostics.truncated = parsed.labels.size() - expected_count;
        parsed.labels.resize(expected_count);
    } else if (parsed.labels.size() < expected_count) {
        parsed.diagnostics.padded = expected_count - parsed.labels.size();
        parsed.labels.resize(expected_count, std::string(kOutsideLabel));
    }
    return parsed;
}

namespace {

SegmentOutcome segment_one(const CompletionClientConfig& config, const Note& note,
                           const LabelSet& label_set, PromptFamily family) {
    SegmentOutcome outcome;
    outcome.note_id = note.note_id;
    try {
        const PromptBundle bundle = build_prompt(note, label_set, family);
        std::string prompt_bytes;
        for (const ChatMessage& message : bundle.messages) {
            prompt_bytes += message.role;
            prompt_bytes += '\n';
            prompt_bytes += message.content;
            prompt_bytes += '\n';
        }
        outcome.prompt_sha256 = sha256_hex(prompt_bytes);

        ParsedPrediction parsed;
        for (int prompt_attempt = 0;; ++prompt_attempt) {
            const CompletionResult completion = request_completion(config, bundle);
            outcome.raw_completion = completion.content;
            outcome.retries += completion.retries;
            try {
                parsed = parse_predictions(completion.content, bundle.expected_line_count);
                break;
            } catch (const NoParsableLines&) {
                if (prompt_attempt >= 1) throw; // one automatic re-prompt
            }
        }
        parsed.note_id = note.note_id;
        outcome.prediction = reconcile_length(std::move(parsed), bundle.expected_line_count);
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

} // namespace

std::vector<SegmentOutcome> segment_with_llm(const CompletionClientConfig& config,
                                             const std::vector<Note>& notes,
                                             const LabelSet& label_set, PromptFamily family) {
    std::vector<SegmentOutcome> outcomes(notes.size());
    const std::size_t in_flight = static_cast<std::size_t>(std::max(1, config.max_in_flight));
    for (std::size_t wave = 0; wave < notes.size(); wave += in_flight) {
        std::vector<std::thread> workers;
        const std::size_t wave_end = std::min(notes.size(), wave + in_flight);
        for (std::size_t i = wave; i < wave_end; ++i) {
            workers.emplace_back(
                [&, i] { outcomes[i] = segment_one(config, notes[i], label_set, family); });
        }
        for (std::thread& worker : workers) worker.join();
    }
    return outcomes;
}

} // namespace sectionseg
