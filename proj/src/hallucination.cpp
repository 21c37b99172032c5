#include "sectionseg/hallucination.hpp"

#include <algorithm>

#include "sectionseg/prompt.hpp"

namespace sectionseg {

namespace {

std::vector<std::string> hyphen_tokens(std::string_view slug) {
    std::vector<std::string> tokens;
    std::size_t begin = 0;
    while (begin <= slug.size()) {
        std::size_t end = slug.find('-', begin);
        if (end == std::string_view::npos) end = slug.size();
        if (end > begin) tokens.emplace_back(slug.substr(begin, end - begin));
        begin = end + 1;
    }
    std::sort(tokens.begin(), tokens.end());
    return tokens;
}

std::size_t token_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t overlap = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++overlap;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return overlap;
}

} // namespace

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> previous(b.size() + 1), current(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) previous[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        current[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t substitution = previous[j - 1] + (a[i - 1] != b[j - 1] ? 1 : 0);
            current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitution});
        }
        std::swap(previous, current);
    }
    return previous[b.size()];
}

HallucinationReport detect_hallucinations(const std::vector<NotePredictions>& predictions,
                                          const LabelSet& label_set) {
    HallucinationReport report;
    for (const NotePredictions& note : predictions) {
        for (const std::string& label : note.labels) {
            ++report.total_lines;
            const std::string normalized = normalize_header(label);
            if (!label_set.contains(normalized)) {
                ++report.hallucinated_lines;
                ++report.per_header_counts[normalized];
            }
        }
    }
    report.distinct_headers = report.per_header_counts.size();
    report.h_percent = report.total_lines == 0
                           ? 0.0
                           : 100.0 * static_cast<double>(report.hallucinated_lines) /
                                 static_cast<double>(report.total_lines);
    return report;
}

std::string fallback_similarity_map(std::string_view invalid, const LabelSet& label_set) {
    const std::string slug = normalize_header(invalid);
    if (label_set.contains(slug)) return slug;
    const std::vector<std::string> slug_tokens = hyphen_tokens(slug);

    const std::string* best = nullptr;
    double best_distance = 0.0;
    std::size_t best_overlap = 0;
    for (const std::string& candidate : label_set.labels()) {
        // the outside label is never a correction target
        if (candidate == kOutsideLabel) continue;
        const std::size_t raw = levenshtein_distance(slug, candidate);
        const std::size_t longest = std::max(slug.size(), candidate.size());
        const double distance =
            longest == 0 ? 0.0 : static_cast<double>(raw) / static_cast<double>(longest);
        const std::size_t overlap = token_overlap(slug_tokens, hyphen_tokens(candidate));
        const bool better =
            best == nullptr || distance < best_distance ||
            (distance == best_distance &&
             (overlap > best_overlap || (overlap == best_overlap && candidate < *best)));
        if (better) {
            best = &candidate;
            best_distance = distance;
            best_overlap = overlap;
        }
    }
    return *best;
}

CorrectionCache::Entry correct_header(const std::string& invalid, const LabelSet& label_set,
                                      const MappingClient& client, CorrectionCache& cache) {
    const auto key = std::make_pair(invalid, label_set.name());
    if (const auto it = cache.entries.find(key); it != cache.entries.end()) return it->second;

    CorrectionCache::Entry entry;
    const std::string normalized = normalize_header(invalid);
    if (label_set.contains(normalized)) {
        entry = {normalized, "fallback"}; // normalization fixed point, distance zero
    } else {
        bool resolved = false;
        if (client) {
            if (const auto reply = client(invalid, label_set); reply.has_value()) {
                const std::string candidate = normalize_header(*reply);
                if (label_set.contains(candidate)) {
                    entry = {candidate, "llm"};
                    resolved = true;
                }
            }
        }
        if (!resolved) entry = {fallback_similarity_map(normalized, label_set), "fallback"};
    }
    cache.entries.emplace(key, entry);
    return entry;
}

std::pair<std::vector<NotePredictions>, CorrectionSummary>
apply_corrections(std::vector<NotePredictions> predictions, const LabelSet& label_set,
                  CorrectionCache& cache, const MappingClient& client) {
    CorrectionSummary summary;
    std::map<std::string, CorrectionRecord> by_header;
    for (NotePredictions& note : predictions) {
        for (std::string& label : note.labels) {
            const std::string normalized = normalize_header(label);
            if (label_set.contains(normalized)) {
                label = normalized;
                continue;
            }
            const CorrectionCache::Entry entry =
                correct_header(normalized, label_set, client, cache);
            CorrectionRecord& record = by_header[normalized];
            record.invalid = normalized;
            record.mapped_to = entry.mapped_to;
            record.method = entry.method;
            ++record.count;
            ++summary.corrected_lines;
            label = entry.mapped_to;
        }
    }
    for (auto& [header, record] : by_header) summary.records.push_back(record);
    std::sort(summary.records.begin(), summary.records.end(),
              [](const CorrectionRecord& a, const CorrectionRecord& b) {
                  if (a.count != b.count) return a.count > b.count;
                  return a.invalid < b.invalid;
              });
    if (summary.corrected_lines > 0) {
        summary.note = "corrected headers are nearest valid labels and may understate "
                       "semantic alignment with the gold standard";
    }
    return {std::move(predictions), std::move(summary)};
}

} // namespace sectionseg
