// sectionseg: clinical note section segmentation toolkit.
//
// Subcommands: ingest, train, predict, correct, evaluate, compare, report.
// A JSON run-configuration file (--config) supplies defaults; command-line
// flags win. All randomness is seeded from the effective configuration and
// every report embeds the configuration fingerprint.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sectionseg/corpus.hpp"
#include "sectionseg/corpus_io.hpp"
#include "sectionseg/crf.hpp"
#include "sectionseg/encoder.hpp"
#include "sectionseg/errors.hpp"
#include "sectionseg/evaluation.hpp"
#include "sectionseg/embedding_client.hpp"
#include "sectionseg/hallucination.hpp"
#include "sectionseg/hash.hpp"
#include "sectionseg/llm_hooks.hpp"
#include "sectionseg/model_io.hpp"
#include "sectionseg/reports.hpp"
#include "sectionseg/segmenter.hpp"
#include "sectionseg/stats.hpp"

namespace {

using nlohmann::ordered_json;
using namespace sectionseg;

// Effective option values: config file first, then flag overrides.
struct Options {
    std::string config_path;
    std::string input;
    std::string lines;
    std::string labels_path;
    std::string consolidation_path;
    std::string model_path;
    std::string out;
    std::string out_dir;
    std::string stats_out;
    std::string per_note_out;
    std::string summary_out;
    std::string run_log;
    std::string cache_path;
    std::string engine = "crf";
    std::string family = "llama";
    std::string correction_mode = "fallback_only";
    std::string compare_a;
    std::string compare_b;

    double split_fraction = 0.8;
    std::uint64_t split_seed = 42;
    std::uint64_t seed = 0;
    std::size_t max_note_lines = 0; // 0 = no cap
    bool exclude_none = false;

    static constexpr std::size_t kUnsetEpochs = static_cast<std::size_t>(-1);
    std::size_t epochs = kUnsetEpochs; // engine default unless set
    double learning_rate = -1.0;   // <0 = engine default
    double l2 = -1.0;
    std::size_t batch_size = 64;
    std::size_t max_tokens = 100;
    std::size_t feature_space = std::size_t{1} << 20;

    std::string base_url;
    std::string model_name;
    double temperature = 0.0;
    std::size_t max_output_tokens = 0;
    int timeout_ms = 30000;
    int max_retries = 2;
    int max_in_flight = 4;
    int backoff_ms = 250;
    std::size_t embed_dim = 0;
};

ordered_json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    try {
        ordered_json config;
        in >> config;
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

template <typename T>
void maybe(const ordered_json& json, const char* key, T& target) {
    if (json.contains(key)) target = json.at(key).get<T>();
}

void apply_config(Options& options) {
    if (options.config_path.empty()) return;
    const ordered_json config = load_config_file(options.config_path);
    // the file-path fields name inputs; they must exist at load time
    for (const char* key : {"spans", "lines", "labels", "consolidation_map", "model"}) {
        if (config.contains(key) &&
            !std::filesystem::exists(config.at(key).get<std::string>())) {
            throw UsageError("config file references missing path '" +
                             config.at(key).get<std::string>() + "' (" + key + ")");
        }
    }
    maybe(config, "spans", options.input);
    maybe(config, "lines", options.lines);
    maybe(config, "labels", options.labels_path);
    maybe(config, "consolidation_map", options.consolidation_path);
    maybe(config, "model", options.model_path);
    maybe(config, "engine", options.engine);
    maybe(config, "out_dir", options.out_dir);
    maybe(config, "max_note_lines", options.max_note_lines);
    maybe(config, "correction_mode", options.correction_mode);
    if (config.contains("split")) {
        maybe(config.at("split"), "fraction", options.split_fraction);
        maybe(config.at("split"), "seed", options.split_seed);
    }
    for (const char* engine : {"crf", "classifier"}) {
        if (!config.contains(engine) || options.engine != engine) continue;
        const auto& section = config.at(engine);
        maybe(section, "epochs", options.epochs);
        maybe(section, "learning_rate", options.learning_rate);
        maybe(section, "l2", options.l2);
        maybe(section, "seed", options.seed);
        maybe(section, "batch_size", options.batch_size);
        maybe(section, "max_tokens", options.max_tokens);
        maybe(section, "feature_space_size", options.feature_space);
    }
    if (config.contains("llm")) {
        const auto& section = config.at("llm");
        maybe(section, "base_url", options.base_url);
        maybe(section, "model_name", options.model_name);
        maybe(section, "family", options.family);
        maybe(section, "temperature", options.temperature);
        maybe(section, "max_output_tokens", options.max_output_tokens);
        maybe(section, "timeout_ms", options.timeout_ms);
        maybe(section, "max_retries", options.max_retries);
        maybe(section, "max_in_flight", options.max_in_flight);
        maybe(section, "backoff_ms", options.backoff_ms);
    }
    if (config.contains("embedding")) {
        const auto& section = config.at("embedding");
        maybe(section, "base_url", options.base_url);
        maybe(section, "model_name", options.model_name);
        maybe(section, "embed_dim", options.embed_dim);
        maybe(section, "timeout_ms", options.timeout_ms);
        maybe(section, "max_in_flight", options.max_in_flight);
    }
}

CompletionClientConfig chat_config(const Options& options) {
    CompletionClientConfig config;
    config.base_url = options.base_url;
    config.model_name = options.model_name;
    config.temperature = options.temperature;
    config.max_output_tokens = options.max_output_tokens;
    config.timeout_ms = options.timeout_ms;
    config.max_retries = options.max_retries;
    config.max_in_flight = options.max_in_flight;
    config.backoff_ms = options.backoff_ms;
    return config;
}

// Fingerprint over the effective per-command configuration; embedded in
// every artifact so runs can be tied back to their settings.
std::string fingerprint(const std::string& command, const Options& options) {
    ordered_json effective;
    effective["command"] = command;
    effective["input"] = options.input;
    effective["lines"] = options.lines;
    effective["labels"] = options.labels_path;
    effective["consolidation_map"] = options.consolidation_path;
    effective["model"] = options.model_path;
    effective["engine"] = options.engine;
    effective["family"] = options.family;
    effective["correction_mode"] = options.correction_mode;
    effective["split"] = {{"fraction", options.split_fraction}, {"seed", options.split_seed}};
    effective["seed"] = options.seed;
    effective["max_note_lines"] = options.max_note_lines;
    effective["exclude_none"] = options.exclude_none;
    effective["epochs"] = options.epochs;
    effective["learning_rate"] = options.learning_rate;
    effective["l2"] = options.l2;
    effective["batch_size"] = options.batch_size;
    effective["max_tokens"] = options.max_tokens;
    effective["feature_space_size"] = options.feature_space;
    effective["model_name"] = options.model_name;
    effective["temperature"] = options.temperature;
    return to_hex(fnv1a64(effective.dump()));
}

void write_json(const std::string& path, const ordered_json& json) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << json.dump(2) << '\n';
}

std::string require(const std::string& value, const char* what) {
    if (value.empty()) throw UsageError(std::string("missing required ") + what);
    return value;
}

// ---------------------------------------------------------------- ingest --

int cmd_ingest(const Options& options) {
    const LabelSet label_set = read_label_set(require(options.labels_path, "--labels"));
    const auto spans = read_span_jsonl(require(options.input, "--input"));

    std::map<std::string, std::string> consolidation;
    if (!options.consolidation_path.empty()) {
        consolidation = read_consolidation_map(options.consolidation_path);
    }

    std::vector<LabeledNote> notes;
    std::set<std::string> seen_ids;
    for (const SpanAnnotatedNote& note : spans) {
        if (!seen_ids.insert(note.note_id).second) {
            throw DataError("duplicate note_id '" + note.note_id + "' in input");
        }
        LabeledNote labeled = project_spans_to_lines(note, label_set);
        if (!consolidation.empty()) labeled = consolidate_labels(labeled, consolidation);
        if (!labeled.lines.empty()) notes.push_back(std::move(labeled));
    }
    write_line_jsonl(require(options.out, "--out"), notes);

    const FrequencyReport stats = corpus_stats(spans);
    std::cout << render_frequency_report(stats);
    if (!options.stats_out.empty()) {
        ordered_json json = to_json(stats);
        json["config_fingerprint"] = fingerprint("ingest", options);
        write_json(options.stats_out, json);
    }
    std::cerr << "ingested " << notes.size() << " notes to " << options.out << "\n";
    return 0;
}

// ----------------------------------------------------------------- train --

int cmd_train(const Options& options) {
    const LabelSet label_set = read_label_set(require(options.labels_path, "--labels"));
    const auto dataset = read_line_jsonl(require(options.lines, "--lines"), &label_set);
    const std::string out = require(options.out, "--out");
    const std::string print_trace_header = "epoch\tmean_loss";

    if (options.engine == "crf") {
        CrfTrainConfig config;
        if (options.epochs != Options::kUnsetEpochs) config.epochs = options.epochs;
        if (options.learning_rate >= 0) config.learning_rate = options.learning_rate;
        if (options.l2 >= 0) config.l2 = options.l2;
        config.seed = options.seed;
        config.max_tokens = options.max_tokens;
        config.feature_space_size = options.feature_space;
        const TrainedCrf trained = train_crf(dataset, label_set, config);
        save_crf_model(out, trained.model, fingerprint("train", options));
        std::cout << print_trace_header << "\n";
        for (std::size_t e = 0; e < trained.nll_trace.size(); ++e) {
            std::cout << e + 1 << "\t" << trained.nll_trace[e] << "\n";
        }
    } else if (options.engine == "classifier") {
        auto [train_lines, eval_lines] =
            split_line_level(dataset, options.split_fraction, options.split_seed);
        (void)eval_lines;
        ClassifierTrainConfig config;
        if (options.epochs != Options::kUnsetEpochs) config.epochs = options.epochs;
        if (options.learning_rate >= 0) config.learning_rate = options.learning_rate;
        if (options.l2 >= 0) config.l2 = options.l2;
        config.seed = options.seed;
        config.batch_size = options.batch_size;
        config.features = FeatureConfig{options.feature_space, options.max_tokens};
        const TrainedClassifier trained = train_line_classifier(train_lines, label_set, config);
        save_classifier_model(out, trained.params, label_set, fingerprint("train", options));
        std::cout << print_trace_header << "\n";
        for (std::size_t e = 0; e < trained.loss_trace.size(); ++e) {
            std::cout << e + 1 << "\t" << trained.loss_trace[e] << "\n";
        }
    } else {
        throw UsageError("train supports --engine crf or classifier, got '" + options.engine +
                         "'");
    }
    std::cerr << "model written to " << out << "\n";
    return 0;
}

// --------------------------------------------------------------- predict --

int cmd_predict(const Options& options) {
    std::vector<LabeledNote> dataset = read_line_jsonl(require(options.lines, "--lines"));
    if (options.max_note_lines > 0) {
        dataset = filter_notes_by_length(std::move(dataset), options.max_note_lines);
    }
    const std::string out = require(options.out, "--out");

    std::vector<NotePredictions> predictions;
    if (options.engine == "crf") {
        const CrfModelFile file = load_crf_model(require(options.model_path, "--model"));
        for (const LabeledNote& note : dataset) {
            predictions.push_back(NotePredictions{
                note.note_id, "crf",
                predict_note(file.model, to_note(note), file.model.encoder.features.max_tokens)});
        }
    } else if (options.engine == "classifier") {
        const ClassifierModelFile file =
            load_classifier_model(require(options.model_path, "--model"));
        for (const LabeledNote& note : dataset) {
            NotePredictions p{note.note_id, "classifier", {}};
            if (file.params.kind == EncoderKind::feature_linear) {
                for (std::size_t i = 0; i < note.lines.size(); ++i) {
                    const Classification c = classify_line(
                        file.params, LineContext{note.lines[i], i, note.lines.size()});
                    p.labels.push_back(
                        file.label_set.label_at(static_cast<std::size_t>(c.label_index)));
                }
            } else {
                EmbeddingProviderConfig embed;
                embed.base_url = options.base_url;
                embed.model_name = options.model_name;
                embed.embed_dim = file.params.embed_dim;
                embed.timeout_ms = options.timeout_ms;
                embed.max_in_flight = options.max_in_flight;
                const auto vectors = remote_embed(embed, note.lines);
                for (const Eigen::VectorXd& vec : vectors) {
                    const Eigen::VectorXd scores = emission_scores(file.params, vec);
                    int best = 0;
                    for (int y = 1; y < scores.size(); ++y) {
                        if (scores(y) > scores(best)) best = y;
                    }
                    p.labels.push_back(file.label_set.label_at(static_cast<std::size_t>(best)));
                }
            }
            predictions.push_back(std::move(p));
        }
    } else if (options.engine == "llm") {
        const LabelSet label_set = read_label_set(require(options.labels_path, "--labels"));
        std::vector<Note> notes;
        notes.reserve(dataset.size());
        for (const LabeledNote& note : dataset) notes.push_back(to_note(note));
        const auto outcomes = segment_with_llm(chat_config(options), notes, label_set,
                                               prompt_family_from_string(options.family));
        const std::string log_path =
            options.run_log.empty() ? out + ".runlog.jsonl" : options.run_log;
        write_run_log(log_path, outcomes, options.family);
        std::size_t failed = 0;
        for (const SegmentOutcome& outcome : outcomes) {
            if (outcome.prediction.has_value()) {
                predictions.push_back(
                    NotePredictions{outcome.note_id, "llm", outcome.prediction->labels});
            } else {
                ++failed;
                std::cerr << "note '" << outcome.note_id << "' failed: " << outcome.error << "\n";
            }
        }
        if (!outcomes.empty() && failed == outcomes.size()) {
            throw TransportError("all " + std::to_string(failed) + " notes failed");
        }
        std::cerr << "run log written to " << log_path << "\n";
    } else {
        throw UsageError("predict supports --engine crf, classifier, or llm, got '" +
                         options.engine + "'");
    }
    write_predictions_jsonl(out, predictions);
    std::cerr << "predictions for " << predictions.size() << " notes written to " << out << "\n";
    return 0;
}

// --------------------------------------------------------------- correct --

int cmd_correct(const Options& options) {
    const LabelSet label_set = read_label_set(require(options.labels_path, "--labels"));
    auto predictions = read_predictions_jsonl(require(options.input, "--predictions"));
    const std::string out = require(options.out, "--out");

    const HallucinationReport before = detect_hallucinations(predictions, label_set);
    CorrectionSummary summary;
    if (options.correction_mode == "off") {
        write_predictions_jsonl(out, predictions);
    } else if (options.correction_mode == "fallback_only" || options.correction_mode == "llm") {
        CorrectionCache cache;
        if (!options.cache_path.empty()) cache = read_correction_cache(options.cache_path);
        MappingClient client;
        if (options.correction_mode == "llm") {
            client = make_llm_mapping_client(chat_config(options));
        }
        auto [corrected, s] = apply_corrections(std::move(predictions), label_set, cache, client);
        summary = std::move(s);
        write_predictions_jsonl(out, corrected);
        if (!options.cache_path.empty()) write_correction_cache(options.cache_path, cache);
    } else {
        throw UsageError("correct supports --mode off, fallback_only, or llm, got '" +
                         options.correction_mode + "'");
    }

    std::cout << render_hallucination_block({{"input", before}});
    std::cout << "\n" << render_correction_summary(summary, 5);
    if (!options.summary_out.empty()) {
        ordered_json json;
        json["hallucinations_before"] = to_json(before);
        json["correction"] = to_json(summary);
        json["config_fingerprint"] = fingerprint("correct", options);
        write_json(options.summary_out, json);
    }
    return 0;
}

// -------------------------------------------------------------- evaluate --

int cmd_evaluate(const Options& options) {
    const LabelSet label_set = read_label_set(require(options.labels_path, "--labels"));
    const auto gold = read_line_jsonl(require(options.lines, "--lines"), &label_set);
    const auto predictions = read_predictions_jsonl(require(options.input, "--predictions"));

    std::map<std::string, const NotePredictions*> by_id;
    for (const NotePredictions& p : predictions) by_id[p.note_id] = &p;

    ConfusionCounts counts(label_set.size());
    std::string engine = "engine";
    for (const LabeledNote& note : gold) {
        const auto it = by_id.find(note.note_id);
        if (it == by_id.end()) {
            throw DataError("no predictions for note '" + note.note_id + "'");
        }
        if (it->second->labels.size() != note.labels.size()) {
            throw LengthMismatch("note '" + note.note_id + "': gold has " +
                                 std::to_string(note.labels.size()) + " lines, predictions " +
                                 std::to_string(it->second->labels.size()));
        }
        engine = it->second->engine;
        accumulate_confusion(counts, note.labels, it->second->labels, label_set);
    }

    const int exclude = options.exclude_none
                            ? static_cast<int>(label_set.outside_index())
                            : -1;
    if (exclude >= 0) {
        // Excluding "<none>" drops its gold lines from support and its cells
        // from both averages.
        counts.support[static_cast<std::size_t>(exclude)] = 0;
        counts.true_positive[static_cast<std::size_t>(exclude)] = 0;
        counts.false_positive[static_cast<std::size_t>(exclude)] = 0;
        counts.false_negative[static_cast<std::size_t>(exclude)] = 0;
    }
    const MetricsReport report = prf_metrics(counts, label_set, MacroPolicy::gold_support_only);
    const MetricsReport full = prf_metrics(counts, label_set, MacroPolicy::all_labels);

    std::cout << render_metrics_table({{engine, report}});
    const HallucinationReport hallucinations = detect_hallucinations(predictions, label_set);
    if (hallucinations.hallucinated_lines > 0) {
        std::cout << "\n" << render_hallucination_block({{engine, hallucinations}});
    }

    if (!options.per_note_out.empty()) {
        write_note_scores_jsonl(options.per_note_out,
                                per_note_scores(gold, predictions, label_set));
        std::cerr << "per-note scores written to " << options.per_note_out << "\n";
    }
    if (!options.out.empty()) {
        ordered_json json;
        json["engine"] = engine;
        json["metrics"] = to_json(report);
        json["macro_full_label_set"] = {{"MP", full.macro_precision},
                                        {"MR", full.macro_recall},
                                        {"MF1", full.macro_f1}};
        if (hallucinations.hallucinated_lines > 0) {
            json["hallucinations"] = to_json(hallucinations);
        }
        json["config_fingerprint"] = fingerprint("evaluate", options);
        write_json(options.out, json);
        std::cerr << "report written to " << options.out << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- compare --

int cmd_compare(const Options& options) {
    const auto scores_a = read_note_scores_jsonl(require(options.compare_a, "--a"));
    const auto scores_b = read_note_scores_jsonl(require(options.compare_b, "--b"));

    std::map<std::string, NoteScore> b_by_id;
    for (const NoteScore& score : scores_b) b_by_id[score.note_id] = score;

    std::vector<double> macro_a, macro_b, weighted_a, weighted_b;
    for (const NoteScore& score : scores_a) {
        const auto it = b_by_id.find(score.note_id);
        if (it == b_by_id.end()) continue;
        macro_a.push_back(score.macro_f1);
        macro_b.push_back(it->second.macro_f1);
        weighted_a.push_back(score.weighted_f1);
        weighted_b.push_back(it->second.weighted_f1);
    }
    if (macro_a.size() < 2) {
        throw DataError("compare: fewer than 2 paired notes between the score files");
    }

    ordered_json json;
    json["paired_notes"] = macro_a.size();
    try {
        const StatTestResult test = wilcoxon_signed_rank(macro_a, macro_b);
        json["wilcoxon_macro_f1"] = to_json(test);
        std::cout << "Wilcoxon on per-note macro F1: W=" << test.statistic
                  << " p=" << test.p_value << " (n_effective=" << test.n_effective << ", "
                  << to_string(test.method) << ")\n";
    } catch (const DegenerateSample&) {
        json["wilcoxon_macro_f1"] = {{"degenerate", true}};
        std::cout << "Wilcoxon on per-note macro F1: no difference between engines\n";
    }

    const auto ci = [&](const std::vector<double>& values) {
        const auto [low, high] = confidence_interval(values, 0.95, options.seed);
        return ordered_json{{"low", low}, {"high", high}};
    };
    json["ci95_macro_f1_a"] = ci(macro_a);
    json["ci95_macro_f1_b"] = ci(macro_b);
    json["ci95_weighted_f1_a"] = ci(weighted_a);
    json["ci95_weighted_f1_b"] = ci(weighted_b);
    json["config_fingerprint"] = fingerprint("compare", options);

    std::cout << "95% CI macro F1 A: [" << json["ci95_macro_f1_a"]["low"] << ", "
              << json["ci95_macro_f1_a"]["high"] << "]\n";
    std::cout << "95% CI macro F1 B: [" << json["ci95_macro_f1_b"]["low"] << ", "
              << json["ci95_macro_f1_b"]["high"] << "]\n";
    if (!options.out.empty()) {
        write_json(options.out, json);
        std::cerr << "comparison written to " << options.out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- report --

int cmd_report(const Options& options) {
    std::ifstream in(require(options.input, "--in"));
    if (!in) throw DataError("cannot open report '" + options.input + "'");
    nlohmann::json saved;
    try {
        in >> saved;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report file is not valid JSON: " + std::string(e.what()));
    }
    const std::string engine = saved.value("engine", "engine");
    if (saved.contains("metrics")) {
        MetricsReport report;
        const auto& m = saved.at("metrics");
        report.macro_precision = m.at("MP").get<double>();
        report.macro_recall = m.at("MR").get<double>();
        report.macro_f1 = m.at("MF1").get<double>();
        report.weighted_precision = m.at("wP").get<double>();
        report.weighted_recall = m.at("wR").get<double>();
        report.weighted_f1 = m.at("wF1").get<double>();
        std::cout << render_metrics_table({{engine, report}});
    }
    if (saved.contains("hallucinations")) {
        const auto& h = saved.at("hallucinations");
        HallucinationReport report;
        report.hallucinated_lines = h.at("HL").get<std::size_t>();
        report.total_lines = h.at("total_lines").get<std::size_t>();
        report.distinct_headers = h.at("HS").get<std::size_t>();
        report.h_percent = h.at("H_percent").get<double>();
        std::cout << "\n" << render_hallucination_block({{engine, report}});
    }
    if (saved.contains("correction")) {
        CorrectionSummary summary;
        for (const auto& record : saved.at("correction").at("records")) {
            summary.records.push_back(CorrectionRecord{
                record.at("invalid").get<std::string>(),
                record.at("mapped_to").get<std::string>(),
                record.at("method").get<std::string>(), record.at("count").get<std::size_t>()});
        }
        summary.corrected_lines = saved.at("correction").value("corrected_lines", 0u);
        std::cout << "\n" << render_correction_summary(summary, 5);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"clinical note section segmentation toolkit"};
    app.require_subcommand(1);

    Options options;
    std::string command;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config_path, "run configuration JSON");
        sub->add_option("--labels", options.labels_path, "label-set file");
        sub->add_option("--seed", options.seed, "PRNG seed");
        sub->add_option("--out", options.out, "output path");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "span JSONL -> line JSONL + stats");
    add_common(ingest);
    ingest->add_option("--input", options.input, "span-annotated JSONL");
    ingest->add_option("--consolidate", options.consolidation_path, "consolidation TSV");
    ingest->add_option("--stats-out", options.stats_out, "frequency report JSON");

    CLI::App* train = app.add_subcommand("train", "train a supervised engine");
    add_common(train);
    train->add_option("--lines", options.lines, "line-level JSONL");
    train->add_option("--engine", options.engine, "crf | classifier");
    train->add_option("--epochs", options.epochs, "training epochs");
    train->add_option("--lr", options.learning_rate, "learning rate");
    train->add_option("--l2", options.l2, "l2 strength");
    train->add_option("--batch-size", options.batch_size, "classifier batch size");
    train->add_option("--max-tokens", options.max_tokens, "per-line token budget");
    train->add_option("--feature-space", options.feature_space, "hashed feature space size");
    train->add_option("--split-fraction", options.split_fraction, "classifier line split");
    train->add_option("--split-seed", options.split_seed, "classifier split seed");

    CLI::App* predict = app.add_subcommand("predict", "label notes with an engine");
    add_common(predict);
    predict->add_option("--lines", options.lines, "line-level JSONL");
    predict->add_option("--engine", options.engine, "crf | classifier | llm");
    predict->add_option("--model", options.model_path, "trained model file");
    predict->add_option("--family", options.family, "llama | mistral | qwen");
    predict->add_option("--max-note-lines", options.max_note_lines, "drop longer notes");
    predict->add_option("--base-url", options.base_url, "endpoint base URL");
    predict->add_option("--model-name", options.model_name, "remote model name");
    predict->add_option("--max-output-tokens", options.max_output_tokens,
                        "completion budget (0 = auto)");
    predict->add_option("--timeout-ms", options.timeout_ms, "request timeout");
    predict->add_option("--max-retries", options.max_retries, "completion retries");
    predict->add_option("--max-in-flight", options.max_in_flight, "concurrent notes");
    predict->add_option("--backoff-ms", options.backoff_ms, "retry backoff base");
    predict->add_option("--run-log", options.run_log, "run log path (llm engine)");

    CLI::App* correct = app.add_subcommand("correct", "fix hallucinated headers");
    add_common(correct);
    correct->add_option("--predictions", options.input, "predictions JSONL");
    correct->add_option("--mode", options.correction_mode, "off | fallback_only | llm");
    correct->add_option("--cache", options.cache_path, "correction cache JSONL");
    correct->add_option("--base-url", options.base_url, "mapping endpoint base URL");
    correct->add_option("--model-name", options.model_name, "mapping model name");
    correct->add_option("--summary-out", options.summary_out, "correction summary JSON");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score predictions against gold");
    add_common(evaluate);
    evaluate->add_option("--lines", options.lines, "gold line-level JSONL");
    evaluate->add_option("--predictions", options.input, "predictions JSONL");
    evaluate->add_option("--per-note-out", options.per_note_out, "per-note score JSONL");
    evaluate->add_flag("--exclude-none", options.exclude_none,
                       "exclude '<none>' from the averages");

    CLI::App* compare = app.add_subcommand("compare", "Wilcoxon + CIs for two engines");
    add_common(compare);
    compare->add_option("--a", options.compare_a, "per-note scores JSONL (engine A)");
    compare->add_option("--b", options.compare_b, "per-note scores JSONL (engine B)");

    CLI::App* report = app.add_subcommand("report", "render a saved report JSON");
    add_common(report);
    report->add_option("--in", options.input, "report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        apply_config(options);
        // Flags win over the config file: re-parse so explicit flags land on top.
        try {
            app.clear();
            app.parse(argc, argv);
        } catch (const CLI::ParseError&) {
            // already reported above
        }

        if (ingest->parsed()) return cmd_ingest(options);
        if (train->parsed()) return cmd_train(options);
        if (predict->parsed()) return cmd_predict(options);
        if (correct->parsed()) return cmd_correct(options);
        if (evaluate->parsed()) return cmd_evaluate(options);
        if (compare->parsed()) return cmd_compare(options);
        if (report->parsed()) return cmd_report(options);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const RemoteError& e) {
        std::cerr << "remote service error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
