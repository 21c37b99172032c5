#include <doctest.h>

#include <cmath>

#include "sectionseg/error_analysis.hpp"
#include "sectionseg/errors.hpp"
#include "sectionseg/evaluation.hpp"
#include "sectionseg/rng.hpp"

#include "support/oracles.hpp"

using namespace sectionseg;

namespace {

LabelSet abc() {
    return LabelSet("abc", {"<none>", "alpha", "beta"});
}

} // namespace

TEST_CASE("confusion_counts") {
    const LabelSet labels = abc();

    SUBCASE("perfect match has no false counts") {
        const std::vector<std::string> gold = {"alpha", "beta", "<none>"};
        const ConfusionCounts counts = confusion_counts(gold, gold, labels);
        for (std::size_t y = 0; y < labels.size(); ++y) {
            CHECK(counts.false_positive[y] == 0);
            CHECK(counts.false_negative[y] == 0);
        }
        CHECK(counts.total_lines == 3);
    }
    SUBCASE("single disagreement") {
        const ConfusionCounts counts = confusion_counts({"alpha"}, {"beta"}, labels);
        CHECK(counts.false_negative[1] == 1);
        CHECK(counts.false_positive[2] == 1);
        CHECK(counts.true_positive[1] == 0);
    }
    SUBCASE("six-line hand tally") {
        const std::vector<std::string> gold = {"alpha", "alpha", "beta",
                                               "beta",  "<none>", "alpha"};
        const std::vector<std::string> predicted = {"alpha", "beta", "beta",
                                                    "<none>", "<none>", "alpha"};
        const ConfusionCounts counts = confusion_counts(gold, predicted, labels);
        CHECK(counts.true_positive[1] == 2);  // alpha
        CHECK(counts.false_negative[1] == 1);
        CHECK(counts.false_positive[1] == 0);
        CHECK(counts.true_positive[2] == 1);  // beta
        CHECK(counts.false_negative[2] == 1);
        CHECK(counts.false_positive[2] == 1);
        CHECK(counts.true_positive[0] == 1);  // <none>
        CHECK(counts.false_positive[0] == 1);
        CHECK(counts.support[1] == 3);
    }
    SUBCASE("invalid predictions count against gold and land in the bucket") {
        const ConfusionCounts counts =
            confusion_counts({"alpha", "beta"}, {"made-up", "beta"}, labels);
        CHECK(counts.false_negative[1] == 1);
        CHECK(counts.invalid_predictions == 1);
        CHECK(counts.false_positive[0] == 0);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(confusion_counts({"alpha"}, {"alpha", "beta"}, labels),
                        LengthMismatch);
        CHECK_THROWS_AS(confusion_counts({"nope"}, {"alpha"}, labels), UnknownLabel);
    }
}

TEST_CASE("prf_metrics") {
    const LabelSet labels = abc();

    SUBCASE("perfect predictions score 1.0 on all six aggregates") {
        const std::vector<std::string> gold = {"alpha", "beta", "<none>", "alpha"};
        const MetricsReport report =
            prf_metrics(confusion_counts(gold, gold, labels), labels);
        CHECK(report.macro_precision == 1.0);
        CHECK(report.macro_recall == 1.0);
        CHECK(report.macro_f1 == 1.0);
        CHECK(report.weighted_precision == 1.0);
        CHECK(report.weighted_recall == 1.0);
        CHECK(report.weighted_f1 == 1.0);
    }
    SUBCASE("all wrong predictions score 0.0") {
        const std::vector<std::string> gold = {"alpha", "beta"};
        const std::vector<std::string> predicted = {"beta", "alpha"};
        const MetricsReport report =
            prf_metrics(confusion_counts(gold, predicted, labels), labels);
        CHECK(report.macro_precision == 0.0);
        CHECK(report.macro_recall == 0.0);
        CHECK(report.macro_f1 == 0.0);
        CHECK(report.weighted_f1 == 0.0);
    }
    SUBCASE("three-label crafted fixture against a hand computation") {
        // supports: alpha 3, beta 2, <none> 1
        const std::vector<std::string> gold = {"alpha", "alpha", "alpha",
                                               "beta",  "beta",  "<none>"};
        const std::vector<std::string> predicted = {"alpha", "beta", "alpha",
                                                    "beta",  "<none>", "<none>"};
        const MetricsReport report =
            prf_metrics(confusion_counts(gold, predicted, labels), labels);
        // alpha: TP2 FP0 FN1 -> P=1, R=2/3, F1=4/5
        // beta:  TP1 FP1 FN1 -> P=1/2, R=1/2, F1=1/2
        // none:  TP1 FP1 FN0 -> P=1/2, R=1, F1=2/3
        const double macro_p = (1.0 + 0.5 + 0.5) / 3.0;
        const double macro_r = (2.0 / 3.0 + 0.5 + 1.0) / 3.0;
        const double macro_f1 = (0.8 + 0.5 + 2.0 / 3.0) / 3.0;
        CHECK(std::fabs(report.macro_precision - macro_p) <= 1e-12);
        CHECK(std::fabs(report.macro_recall - macro_r) <= 1e-12);
        CHECK(std::fabs(report.macro_f1 - macro_f1) <= 1e-12);
        const double weighted_p = (3 * 1.0 + 2 * 0.5 + 1 * 0.5) / 6.0;
        const double weighted_r = (3 * (2.0 / 3.0) + 2 * 0.5 + 1 * 1.0) / 6.0;
        const double weighted_f1 = (3 * 0.8 + 2 * 0.5 + 1 * (2.0 / 3.0)) / 6.0;
        CHECK(std::fabs(report.weighted_precision - weighted_p) <= 1e-12);
        CHECK(std::fabs(report.weighted_recall - weighted_r) <= 1e-12);
        CHECK(std::fabs(report.weighted_f1 - weighted_f1) <= 1e-12);
    }
    SUBCASE("macro policies differ on unsupported labels") {
        const ConfusionCounts counts = confusion_counts({"alpha"}, {"alpha"}, labels);
        const MetricsReport support_only =
            prf_metrics(counts, labels, MacroPolicy::gold_support_only);
        const MetricsReport all =
            prf_metrics(counts, labels, MacroPolicy::all_labels);
        CHECK(support_only.macro_f1 == 1.0);
        CHECK(all.macro_f1 == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("fuzzed agreement with the brute-force oracle") {
        Rng rng = seeded_rng(99);
        const std::vector<std::string> pool = {"<none>", "alpha", "beta", "invalid-header"};
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<std::string> gold, predicted;
            const std::size_t n = 1 + uniform_index(rng, 40);
            for (std::size_t i = 0; i < n; ++i) {
                gold.push_back(pool[uniform_index(rng, 3)]); // valid labels only
                predicted.push_back(pool[uniform_index(rng, pool.size())]);
            }
            const MetricsReport report =
                prf_metrics(confusion_counts(gold, predicted, labels), labels);
            const oracle::OracleMetrics expected =
                oracle::brute_force_metrics(gold, predicted, labels.labels());
            CHECK(std::fabs(report.macro_precision - expected.macro_p) <= 1e-12);
            CHECK(std::fabs(report.macro_recall - expected.macro_r) <= 1e-12);
            CHECK(std::fabs(report.macro_f1 - expected.macro_f1) <= 1e-12);
            CHECK(std::fabs(report.weighted_precision - expected.weighted_p) <= 1e-12);
            CHECK(std::fabs(report.weighted_recall - expected.weighted_r) <= 1e-12);
            CHECK(std::fabs(report.weighted_f1 - expected.weighted_f1) <= 1e-12);

            // weighted recall is micro accuracy over the full averaging set
            std::size_t correct = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (gold[i] == predicted[i]) ++correct;
            }
            CHECK(std::fabs(report.weighted_recall - double(correct) / double(n)) <= 1e-12);
        }
    }
}

TEST_CASE("per_note_scores") {
    const LabelSet labels = abc();

    SUBCASE("single note equals the corpus metric") {
        const std::vector<LabeledNote> gold = {
            {"n", {"a", "b", "c"}, {"alpha", "beta", "alpha"}}};
        const std::vector<NotePredictions> predictions = {
            {"n", "crf", {"alpha", "alpha", "alpha"}}};
        const auto scores = per_note_scores(gold, predictions, labels);
        REQUIRE(scores.size() == 1);
        const MetricsReport corpus = prf_metrics(
            confusion_counts(gold[0].labels, predictions[0].labels, labels), labels);
        CHECK(scores[0].macro_f1 == doctest::Approx(corpus.macro_f1).epsilon(1e-12));
        CHECK(scores[0].weighted_f1 == doctest::Approx(corpus.weighted_f1).epsilon(1e-12));
    }
    SUBCASE("perfect note scores 1.0 on both aggregates") {
        const std::vector<LabeledNote> gold = {{"n", {"a"}, {"beta"}}};
        const std::vector<NotePredictions> predictions = {{"n", "crf", {"beta"}}};
        const auto scores = per_note_scores(gold, predictions, labels);
        CHECK(scores[0].macro_f1 == 1.0);
        CHECK(scores[0].weighted_f1 == 1.0);
    }
    SUBCASE("three-note fixture by hand") {
        const std::vector<LabeledNote> gold = {
            {"n1", {"a", "b"}, {"alpha", "alpha"}},
            {"n2", {"a", "b"}, {"alpha", "beta"}},
            {"n3", {"a"}, {"<none>"}},
        };
        const std::vector<NotePredictions> predictions = {
            {"n1", "crf", {"alpha", "beta"}},
            {"n2", "crf", {"alpha", "beta"}},
            {"n3", "crf", {"alpha"}},
        };
        const auto scores = per_note_scores(gold, predictions, labels);
        REQUIRE(scores.size() == 3);
        // n1: alpha TP1 FN1 FP0 -> P1 R0.5 F1=2/3; macro over {alpha} = 2/3
        CHECK(scores[0].macro_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(scores[1].macro_f1 == 1.0);
        CHECK(scores[2].macro_f1 == 0.0);
    }
    SUBCASE("missing prediction for a note") {
        const std::vector<LabeledNote> gold = {{"n", {"a"}, {"alpha"}}};
        CHECK_THROWS_AS(per_note_scores(gold, {}, labels), DataError);
    }
}

TEST_CASE("categorize_errors") {
    const LabelSet labels = abc();
    const std::vector<LabeledNote> gold = {
        {"n", {"l0", "l1", "l2", "l3", "l4"},
         {"alpha", "beta", "alpha", "<none>", "beta"}}};

    SUBCASE("rule-based omission, classifier for the rest") {
        const std::vector<NotePredictions> predictions = {
            {"n", "llm", {"alpha", "<none>", "beta", "alpha", "beta"}}};
        // line1: omission (gold beta, predicted <none>)
        // line2: scripted label_confusion; line3: gold <none> so not omission
        const ErrorClassifier classifier =
            [](const std::string& line, const std::string&,
               const std::string&) -> std::optional<std::string> {
            if (line == "l2") return "label_confusion";
            if (line == "l3") return "valid_local_interpretation";
            return "other";
        };
        const ErrorBreakdown breakdown = categorize_errors(gold, predictions, classifier);
        CHECK(breakdown.omission == 1);
        CHECK(breakdown.label_confusion == 1);
        CHECK(breakdown.valid_local_interpretation == 1);
        CHECK(breakdown.other == 0);
        CHECK_FALSE(breakdown.rule_only);
        CHECK(breakdown.records.size() == 3);
        // counts partition the mismatched lines
        CHECK(breakdown.omission + breakdown.label_confusion +
                  breakdown.valid_local_interpretation + breakdown.other ==
              breakdown.records.size());
    }
    SUBCASE("non-compliant classifier replies degrade to other") {
        const std::vector<NotePredictions> predictions = {
            {"n", "llm", {"beta", "beta", "alpha", "<none>", "beta"}}};
        const ErrorClassifier classifier = [](const std::string&, const std::string&,
                                              const std::string&) {
            return std::optional<std::string>("no idea, sorry");
        };
        const ErrorBreakdown breakdown = categorize_errors(gold, predictions, classifier);
        CHECK(breakdown.other == 1);
        CHECK(breakdown.omission == 0);
    }
    SUBCASE("no classifier marks the breakdown rule-only") {
        const std::vector<NotePredictions> predictions = {
            {"n", "llm", {"beta", "<none>", "alpha", "<none>", "beta"}}};
        const ErrorBreakdown breakdown = categorize_errors(gold, predictions, nullptr);
        CHECK(breakdown.rule_only);
        CHECK(breakdown.omission == 1);       // line1
        CHECK(breakdown.other == 1);          // line0 has no classifier
        CHECK(breakdown.label_confusion == 0);
    }
    SUBCASE("matching lines are excluded entirely") {
        const std::vector<NotePredictions> predictions = {
            {"n", "llm", {"alpha", "beta", "alpha", "<none>", "beta"}}};
        const ErrorBreakdown breakdown = categorize_errors(gold, predictions, nullptr);
        CHECK(breakdown.records.empty());
    }
}
