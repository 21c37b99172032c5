#include <doctest.h>

#include "sectionseg/reports.hpp"

using namespace sectionseg;

TEST_CASE("format_percent_half_up") {
    CHECK(format_percent_half_up(0, 0) == "0.00");
    CHECK(format_percent_half_up(0, 10) == "0.00");
    CHECK(format_percent_half_up(10, 10) == "100.00");
    CHECK(format_percent_half_up(1, 3) == "33.33");
    CHECK(format_percent_half_up(2, 3) == "66.67");
    // exact .005 boundaries round up: 1/800 = 0.125%, 3/800 = 0.375%
    CHECK(format_percent_half_up(1, 800) == "0.13");
    CHECK(format_percent_half_up(3, 800) == "0.38");
    CHECK(format_percent_half_up(1, 8) == "12.50");
}

TEST_CASE("metrics table layout") {
    MetricsReport report;
    report.macro_precision = 0.715;
    report.macro_recall = 0.69;
    report.macro_f1 = 0.68;
    report.weighted_precision = 0.785;
    report.weighted_recall = 0.78;
    report.weighted_f1 = 0.77;
    const std::string table = render_metrics_table({{"crf", report}});
    CHECK(table.find("Model") == 0);
    CHECK(table.find("MP") != std::string::npos);
    CHECK(table.find("MF1") != std::string::npos);
    CHECK(table.find("wF1") != std::string::npos);
    CHECK(table.find("0.71") != std::string::npos); // 0.715 sits below the tie in binary
    CHECK(table.find("0.77") != std::string::npos);
    // column order is MP MR MF1 wP wR wF1
    CHECK(table.find("MP") < table.find("MR"));
    CHECK(table.find("MR") < table.find("MF1"));
    CHECK(table.find("MF1") < table.find("wP"));
    CHECK(table.find("wP") < table.find("wR"));
    CHECK(table.find("wR") < table.find("wF1"));
}

TEST_CASE("hallucination block layout") {
    HallucinationReport report;
    report.hallucinated_lines = 2560;
    report.total_lines = 11528;
    report.distinct_headers = 433;
    report.h_percent = 100.0 * 2560 / 11528;
    const std::string block = render_hallucination_block({{"mistral", report}});
    CHECK(block.find("HL") != std::string::npos);
    CHECK(block.find("H%") != std::string::npos);
    CHECK(block.find("HS") != std::string::npos);
    CHECK(block.find("2560") != std::string::npos);
    CHECK(block.find("22.21%") != std::string::npos);
    CHECK(block.find("433") != std::string::npos);
}

TEST_CASE("correction summary renders top-k rows in order") {
    CorrectionSummary summary;
    summary.records = {
        {"substance-abuse", "social-history", "llm", 12},
        {"neurologic", "review-of-systems", "fallback", 7},
        {"psychiatric", "social-history", "llm", 3},
    };
    summary.corrected_lines = 22;
    const std::string text = render_correction_summary(summary, 2);
    CHECK(text.find("substance-abuse") != std::string::npos);
    CHECK(text.find("neurologic") != std::string::npos);
    CHECK(text.find("psychiatric") == std::string::npos); // beyond top 2
    CHECK(text.find("substance-abuse") < text.find("neurologic"));

    const CorrectionSummary empty;
    CHECK(render_correction_summary(empty, 5).find("no hallucinated headers") !=
          std::string::npos);
}

TEST_CASE("json emitters carry the schema fields") {
    HallucinationReport report;
    report.hallucinated_lines = 5;
    report.total_lines = 5352;
    report.distinct_headers = 4;
    report.h_percent = 100.0 * 5 / 5352;
    report.per_header_counts = {{"comments", 2}, {"risk-factors", 3}};
    const auto json = to_json(report);
    CHECK(json.at("HL") == 5);
    CHECK(json.at("HS") == 4);
    CHECK(json.at("H_percent_display") == "0.09");
    CHECK(json.at("per_header_counts").at("comments") == 2);

    StatTestResult stat;
    stat.statistic = 0.0;
    stat.p_value = 0.03125;
    stat.n_effective = 6;
    stat.method = StatMethod::exact;
    const auto stat_json = to_json(stat);
    CHECK(stat_json.at("method") == "exact");
    CHECK(stat_json.at("p_value") == 0.03125);
}
