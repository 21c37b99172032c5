#include "sectionseg/encoder.hpp"

#include <cmath>
#include <numeric>

#include "sectionseg/errors.hpp"
#include "sectionseg/numeric.hpp"
#include "sectionseg/rng.hpp"

namespace sectionseg {

std::string to_string(EncoderKind kind) {
    return kind == EncoderKind::feature_linear ? "feature_linear" : "remote_embedding";
}

EncoderKind encoder_kind_from_string(std::string_view name) {
    if (name == "feature_linear") return EncoderKind::feature_linear;
    if (name == "remote_embedding") return EncoderKind::remote_embedding;
    throw DataError("unknown encoder kind '" + std::string(name) + "'");
}

EncoderParams EncoderParams::feature_linear_zeros(std::size_t num_labels, FeatureConfig config) {
    EncoderParams params;
    params.kind = EncoderKind::feature_linear;
    params.features = config;
    params.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_labels),
                                           static_cast<Eigen::Index>(config.feature_space_size));
    return params;
}

EncoderParams EncoderParams::remote_embedding_zeros(std::size_t num_labels,
                                                    std::size_t embed_dim) {
    EncoderParams params;
    params.kind = EncoderKind::remote_embedding;
    params.embed_dim = embed_dim;
    params.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_labels),
                                           static_cast<Eigen::Index>(embed_dim));
    return params;
}

Eigen::VectorXd emission_scores(const EncoderParams& params, const FeatureVector& features) {
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(params.weights.rows());
    for (const auto& [index, weight] : features.entries) {
        if (static_cast<Eigen::Index>(index) >= params.weights.cols()) {
            throw DimensionMismatch("emission_scores: feature index " + std::to_string(index) +
                                    " outside weight matrix with " +
                                    std::to_string(params.weights.cols()) + " columns");
        }
        scores += weight * params.weights.col(index);
    }
    return scores;
}

Eigen::VectorXd emission_scores(const EncoderParams& params,
                                const Eigen::Ref<const Eigen::VectorXd>& embedding) {
    if (embedding.size() != params.weights.cols()) {
        throw DimensionMismatch("emission_scores: embedding dim " +
                                std::to_string(embedding.size()) + " != weight columns " +
                                std::to_string(params.weights.cols()));
    }
    return params.weights * embedding;
}

Classification classify_line(const EncoderParams& params, const LineContext& line) {
    const FeatureVector features =
        extract_features(line.text, line.position, line.note_length, params.features);
    const Eigen::VectorXd scores = emission_scores(params, features);
    Classification out;
    out.probabilities = softmax(scores);
    out.label_index = argmax_lowest(out.probabilities);
    return out;
}

namespace {

// Shared softmax-regression loop over sparse inputs. Inputs are
// (entries, gold index) pairs; the weight decay step applies the exact
// l2 gradient before the per-column cross-entropy updates.
struct SparseExample {
    FeatureVector features;
    int gold = 0;
};

double objective(const Eigen::MatrixXd& weights, const std::vector<SparseExample>& examples,
                 double l2) {
    double ce = 0.0;
    Eigen::VectorXd scores(weights.rows());
    for (const SparseExample& ex : examples) {
        scores.setZero();
        for (const auto& [index, weight] : ex.features.entries) {
            scores += weight * weights.col(index);
        }
        ce -= std::log(softmax(scores)(ex.gold));
    }
    return ce / static_cast<double>(examples.size()) + 0.5 * l2 * weights.squaredNorm();
}

TrainedClassifier run_gradient_descent(std::vector<SparseExample> examples,
                                       std::size_t num_labels, std::size_t input_dim,
                                       const ClassifierTrainConfig& config,
                                       EncoderParams params) {
    if (examples.empty()) throw EmptyTrainingSet("train: empty training set");
    const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);

    TrainedClassifier out;
    out.params = std::move(params);
    Eigen::MatrixXd& weights = out.params.weights;

    Rng rng = seeded_rng(config.seed);
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<Eigen::VectorXd> errors(batch_size, Eigen::VectorXd(num_labels));
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        seeded_shuffle(order, rng);
        for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
            const std::size_t count = std::min(batch_size, order.size() - begin);
            // Errors for the whole batch come from the pre-update weights.
            for (std::size_t b = 0; b < count; ++b) {
                const SparseExample& ex = examples[order[begin + b]];
                Eigen::VectorXd scores = Eigen::VectorXd::Zero(num_labels);
                for (const auto& [index, weight] : ex.features.entries) {
                    scores += weight * weights.col(index);
                }
                errors[b] = softmax(scores);
                errors[b](ex.gold) -= 1.0;
            }
            if (config.l2 != 0.0) weights *= 1.0 - config.learning_rate * config.l2;
            const double step = config.learning_rate / static_cast<double>(count);
            for (std::size_t b = 0; b < count; ++b) {
                const SparseExample& ex = examples[order[begin + b]];
                for (const auto& [index, weight] : ex.features.entries) {
                    weights.col(index) -= step * weight * errors[b];
                }
            }
        }
        out.loss_trace.push_back(objective(weights, examples, config.l2));
    }
    (void)input_dim;
    return out;
}

} // namespace

namespace {

std::vector<SparseExample> featurize(const EncoderParams& params,
                                     const std::vector<LineExample>& lines,
                                     const LabelSet& label_set) {
    std::vector<SparseExample> examples;
    examples.reserve(lines.size());
    for (const LineExample& line : lines) {
        const int gold = label_set.index_of(line.label);
        if (gold < 0) {
            throw UnknownLabel("classifier: label '" + line.label + "' not in label set '" +
                               label_set.name() + "'");
        }
        examples.push_back(SparseExample{
            extract_features(line.text, line.position, line.note_length, params.features),
            gold});
    }
    return examples;
}

} // namespace

double classifier_objective(const EncoderParams& params, const std::vector<LineExample>& lines,
                            const LabelSet& label_set, double l2) {
    if (lines.empty()) throw EmptyTrainingSet("classifier_objective: empty set");
    return objective(params.weights, featurize(params, lines, label_set), l2);
}

Eigen::MatrixXd classifier_gradient(const EncoderParams& params,
                                    const std::vector<LineExample>& lines,
                                    const LabelSet& label_set, double l2) {
    if (lines.empty()) throw EmptyTrainingSet("classifier_gradient: empty set");
    const std::vector<SparseExample> examples = featurize(params, lines, label_set);
    Eigen::MatrixXd grad = l2 * params.weights;
    const double inv_n = 1.0 / static_cast<double>(examples.size());
    for (const SparseExample& ex : examples) {
        Eigen::VectorXd scores = Eigen::VectorXd::Zero(params.weights.rows());
        for (const auto& [index, weight] : ex.features.entries) {
            scores += weight * params.weights.col(index);
        }
        Eigen::VectorXd error = softmax(scores);
        error(ex.gold) -= 1.0;
        for (const auto& [index, weight] : ex.features.entries) {
            grad.col(index) += inv_n * weight * error;
        }
    }
    return grad;
}

TrainedClassifier train_line_classifier(const std::vector<LineExample>& train,
                                        const LabelSet& label_set,
                                        const ClassifierTrainConfig& config) {
    if (train.empty()) throw EmptyTrainingSet("train_line_classifier: empty training set");
    std::vector<SparseExample> examples;
    examples.reserve(train.size());
    for (const LineExample& line : train) {
        const int gold = label_set.index_of(line.label);
        if (gold < 0) {
            throw UnknownLabel("train_line_classifier: label '" + line.label +
                               "' not in label set '" + label_set.name() + "'");
        }
        examples.push_back(SparseExample{
            extract_features(line.text, line.position, line.note_length, config.features), gold});
    }
    return run_gradient_descent(
        std::move(examples), label_set.size(), config.features.feature_space_size, config,
        EncoderParams::feature_linear_zeros(label_set.size(), config.features));
}

TrainedClassifier train_embedding_classifier(const std::vector<Eigen::VectorXd>& embeddings,
                                             const std::vector<std::string>& labels,
                                             const LabelSet& label_set,
                                             const ClassifierTrainConfig& config) {
    if (embeddings.empty()) throw EmptyTrainingSet("train_embedding_classifier: empty training set");
    if (embeddings.size() != labels.size()) {
        throw LengthMismatch("train_embedding_classifier: embeddings and labels differ in length");
    }
    const std::size_t dim = static_cast<std::size_t>(embeddings.front().size());
    std::vector<SparseExample> examples;
    examples.reserve(embeddings.size());
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (static_cast<std::size_t>(embeddings[i].size()) != dim) {
            throw DimensionMismatch("train_embedding_classifier: inconsistent embedding dims");
        }
        const int gold = label_set.index_of(labels[i]);
        if (gold < 0) {
            throw UnknownLabel("train_embedding_classifier: label '" + labels[i] +
                               "' not in label set '" + label_set.name() + "'");
        }
        SparseExample ex;
        ex.gold = gold;
        ex.features.entries.reserve(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            ex.features.entries.emplace_back(static_cast<std::uint32_t>(d), embeddings[i](d));
        }
        examples.push_back(std::move(ex));
    }
    return run_gradient_descent(std::move(examples), label_set.size(), dim, config,
                                EncoderParams::remote_embedding_zeros(label_set.size(), dim));
}

} // namespace sectionseg
