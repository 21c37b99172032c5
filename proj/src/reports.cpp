#include "sectionseg/reports.hpp"

#include <cmath>
#include <cstdio>

namespace sectionseg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string pad_right(std::string text, std::size_t width) {
    while (text.size() < width) text.push_back(' ');
    return text;
}

std::string pad_left(std::string text, std::size_t width) {
    while (text.size() < width) text.insert(text.begin(), ' ');
    return text;
}

} // namespace

std::string format_percent_half_up(std::size_t count, std::size_t total) {
    if (total == 0) return "0.00";
    const auto cents = static_cast<long long>(
        std::floor(10000.0 * static_cast<double>(count) / static_cast<double>(total) + 0.5));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%02lld", cents / 100, cents % 100);
    return buf;
}

std::string format_fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string render_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::size_t name_width = 5;
    for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());

    std::string out = pad_right("Model", name_width);
    for (const char* column : {"MP", "MR", "MF1", "wP", "wR", "wF1"}) {
        out += pad_left(column, 8);
    }
    out += '\n';
    for (const auto& [name, report] : rows) {
        out += pad_right(name, name_width);
        for (const double value :
             {report.macro_precision, report.macro_recall, report.macro_f1,
              report.weighted_precision, report.weighted_recall, report.weighted_f1}) {
            out += pad_left(format_fixed2(value), 8);
        }
        out += '\n';
    }
    return out;
}

std::string render_hallucination_block(
    const std::vector<std::pair<std::string, HallucinationReport>>& rows) {
    std::size_t name_width = 5;
    for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());

    std::string out = pad_right("Model", name_width);
    for (const char* column : {"HL", "H%", "HS"}) out += pad_left(column, 10);
    out += '\n';
    for (const auto& [name, report] : rows) {
        out += pad_right(name, name_width);
        out += pad_left(std::to_string(report.hallucinated_lines), 10);
        out += pad_left(
            format_percent_half_up(report.hallucinated_lines, report.total_lines) + "%", 10);
        out += pad_left(std::to_string(report.distinct_headers), 10);
        out += '\n';
    }
    return out;
}

std::string render_correction_summary(const CorrectionSummary& summary, std::size_t top_k) {
    std::size_t header_width = 20;
    for (const CorrectionRecord& record : summary.records) {
        header_width = std::max(header_width, record.invalid.size());
    }
    std::string out = pad_right("Hallucinated Header", header_width) + pad_left("Count", 8) +
                      "  " + pad_right("Mapped To", 28) + "Method\n";
    std::size_t shown = 0;
    for (const CorrectionRecord& record : summary.records) {
        if (shown++ == top_k) break;
        out += pad_right(record.invalid, header_width);
        out += pad_left(std::to_string(record.count), 8);
        out += "  ";
        out += pad_right(record.mapped_to, 28);
        out += record.method;
        out += '\n';
    }
    if (summary.records.empty()) out += "(no hallucinated headers)\n";
    if (!summary.note.empty()) out += "note: " + summary.note + "\n";
    return out;
}

std::string render_frequency_report(const FrequencyReport& report) {
    std::size_t label_width = 14;
    for (const FrequencyRow& row : report.rows) {
        label_width = std::max(label_width, row.label.size());
    }
    std::string out =
        pad_right("Section Header", label_width) + pad_left("Total Spans", 13) +
        pad_left("Overall %", 11) + '\n';
    for (const FrequencyRow& row : report.rows) {
        out += pad_right(row.label, label_width);
        out += pad_left(std::to_string(row.span_count), 13);
        out += pad_left(format_fixed2(row.overall_percent), 11);
        out += '\n';
    }
    out += "total spans: " + std::to_string(report.total_spans) + '\n';
    return out;
}

ordered_json to_json(const MetricsReport& report) {
    ordered_json json;
    json["MP"] = report.macro_precision;
    json["MR"] = report.macro_recall;
    json["MF1"] = report.macro_f1;
    json["wP"] = report.weighted_precision;
    json["wR"] = report.weighted_recall;
    json["wF1"] = report.weighted_f1;
    json["total_lines"] = report.total_lines;
    json["invalid_predictions"] = report.invalid_predictions;
    ordered_json per_label = ordered_json::array();
    for (const PerLabelMetrics& m : report.per_label) {
        per_label.push_back({{"label", m.label},
                             {"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", m.support}});
    }
    json["per_label"] = std::move(per_label);
    return json;
}

ordered_json to_json(const HallucinationReport& report) {
    ordered_json json;
    json["HL"] = report.hallucinated_lines;
    json["total_lines"] = report.total_lines;
    json["H_percent"] = report.h_percent;
    json["H_percent_display"] =
        format_percent_half_up(report.hallucinated_lines, report.total_lines);
    json["HS"] = report.distinct_headers;
    ordered_json counts = ordered_json::object();
    for (const auto& [header, count] : report.per_header_counts) counts[header] = count;
    json["per_header_counts"] = std::move(counts);
    return json;
}

ordered_json to_json(const CorrectionSummary& summary) {
    ordered_json json;
    json["corrected_lines"] = summary.corrected_lines;
    ordered_json records = ordered_json::array();
    for (const CorrectionRecord& record : summary.records) {
        records.push_back({{"invalid", record.invalid},
                           {"mapped_to", record.mapped_to},
                           {"method", record.method},
                           {"count", record.count}});
    }
    json["records"] = std::move(records);
    if (!summary.note.empty()) json["note"] = summary.note;
    return json;
}

ordered_json to_json(const StatTestResult& result) {
    ordered_json json;
    json["statistic"] = result.statistic;
    json["p_value"] = result.p_value;
    json["n_effective"] = result.n_effective;
    json["method"] = to_string(result.method);
    return json;
}

ordered_json to_json(const FrequencyReport& report) {
    ordered_json json;
    json["total_spans"] = report.total_spans;
    ordered_json rows = ordered_json::array();
    for (const FrequencyRow& row : report.rows) {
        rows.push_back({{"label", row.label},
                        {"span_count", row.span_count},
                        {"overall_percent", row.overall_percent}});
    }
    json["rows"] = std::move(rows);
    return json;
}

ordered_json to_json(const ErrorBreakdown& breakdown) {
    ordered_json json;
    json["omission"] = breakdown.omission;
    json["label_confusion"] = breakdown.label_confusion;
    json["valid_local_interpretation"] = breakdown.valid_local_interpretation;
    json["other"] = breakdown.other;
    json["rule_only"] = breakdown.rule_only;
    ordered_json records = ordered_json::array();
    for (const ErrorRecord& record : breakdown.records) {
        records.push_back({{"note_id", record.note_id},
                           {"line_index", record.line_index},
                           {"gold", record.gold},
                           {"predicted", record.predicted},
                           {"category", to_string(record.category)}});
    }
    json["records"] = std::move(records);
    return json;
}

} // namespace sectionseg
