#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sectionseg/corpus.hpp"
#include "sectionseg/features.hpp"
#include "sectionseg/labels.hpp"

namespace sectionseg {

enum class EncoderKind { feature_linear, remote_embedding };

std::string to_string(EncoderKind kind);
EncoderKind encoder_kind_from_string(std::string_view name);

// Linear projection from a line representation (hashed features or a remote
// embedding) to per-label emission scores.
struct EncoderParams {
    EncoderKind kind = EncoderKind::feature_linear;
    Eigen::MatrixXd weights; // |labels| x input_dim, zero-initialized
    FeatureConfig features;  // feature_linear only
    std::size_t embed_dim = 0; // remote_embedding only

    std::size_t input_dim() const {
        return kind == EncoderKind::feature_linear ? features.feature_space_size : embed_dim;
    }

    static EncoderParams feature_linear_zeros(std::size_t num_labels, FeatureConfig config);
    static EncoderParams remote_embedding_zeros(std::size_t num_labels, std::size_t embed_dim);
};

struct LineContext {
    std::string_view text;
    std::size_t position = 0;
    std::size_t note_length = 1;
};

Eigen::VectorXd emission_scores(const EncoderParams& params, const FeatureVector& features);
Eigen::VectorXd emission_scores(const EncoderParams& params,
                                const Eigen::Ref<const Eigen::VectorXd>& embedding);

struct Classification {
    int label_index = 0;
    Eigen::VectorXd probabilities;
};

Classification classify_line(const EncoderParams& params, const LineContext& line);

struct ClassifierTrainConfig {
    std::size_t epochs = 20;
    double learning_rate = 0.1;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    std::size_t batch_size = 64;
    FeatureConfig features;
};

struct TrainedClassifier {
    EncoderParams params;
    std::vector<double> loss_trace; // objective after each epoch
};

// Mini-batch gradient descent on mean cross-entropy plus (l2/2)*||W||^2 from
// zero initialization; deterministic for a fixed seed.
TrainedClassifier train_line_classifier(const std::vector<LineExample>& train,
                                        const LabelSet& label_set,
                                        const ClassifierTrainConfig& config);

// Objective and full-batch gradient of the classifier loss at the given
// params; the gradient pairs with central finite differences in tests.
double classifier_objective(const EncoderParams& params, const std::vector<LineExample>& lines,
                            const LabelSet& label_set, double l2);
Eigen::MatrixXd classifier_gradient(const EncoderParams& params,
                                    const std::vector<LineExample>& lines,
                                    const LabelSet& label_set, double l2);

// Same optimizer over fixed dense line embeddings (remote encoder path).
TrainedClassifier train_embedding_classifier(const std::vector<Eigen::VectorXd>& embeddings,
                                             const std::vector<std::string>& labels,
                                             const LabelSet& label_set,
                                             const ClassifierTrainConfig& config);

} // namespace sectionseg
