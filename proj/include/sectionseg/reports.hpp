#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sectionseg/corpus.hpp"
#include "sectionseg/error_analysis.hpp"
#include "sectionseg/evaluation.hpp"
#include "sectionseg/hallucination.hpp"
#include "sectionseg/stats.hpp"

namespace sectionseg {

// Display convention for percentages: round half-up to 2 decimals.
std::string format_percent_half_up(std::size_t count, std::size_t total);
std::string format_fixed2(double value);

// Aligned text table with MP MR MF1 wP wR wF1 columns, one row per engine.
std::string render_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

// HL / H% / HS block.
std::string render_hallucination_block(
    const std::vector<std::pair<std::string, HallucinationReport>>& rows);

// Top-k corrected headers by frequency.
std::string render_correction_summary(const CorrectionSummary& summary, std::size_t top_k);

std::string render_frequency_report(const FrequencyReport& report);

nlohmann::ordered_json to_json(const MetricsReport& report);
nlohmann::ordered_json to_json(const HallucinationReport& report);
nlohmann::ordered_json to_json(const CorrectionSummary& summary);
nlohmann::ordered_json to_json(const StatTestResult& result);
nlohmann::ordered_json to_json(const FrequencyReport& report);
nlohmann::ordered_json to_json(const ErrorBreakdown& breakdown);

} // namespace sectionseg
