#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sectionseg/corpus.hpp"
#include "sectionseg/encoder.hpp"
#include "sectionseg/labels.hpp"

namespace sectionseg {

// Label-transition scores: scores(i, j) is the score of label j directly
// following label i. Start/end vectors score the first and last label.
struct TransitionMatrix {
    Eigen::MatrixXd scores;
    Eigen::VectorXd start_scores;
    Eigen::VectorXd end_scores;

    static TransitionMatrix zeros(std::size_t num_labels);
    std::size_t num_labels() const { return static_cast<std::size_t>(start_scores.size()); }
};

// One note arranged as the (B=1, L, S) structure: per-line token lists
// truncated to the token budget. Raw lines ride along for feature
// extraction; gold labels when the source note had them.
struct CollatedNote {
    std::size_t batch = 1;
    std::size_t line_count = 0;
    std::size_t token_budget = 0;
    std::vector<std::vector<std::string>> tokens;
    std::vector<std::string> raw_lines;
    std::optional<std::vector<std::string>> gold;
    std::string note_id;
};

struct CrfModel {
    EncoderParams encoder;
    TransitionMatrix transitions;
    LabelSet label_set;
};

CollatedNote collate(const Note& note, std::size_t max_tokens);
CollatedNote collate(const LabeledNote& note, std::size_t max_tokens);

// L x |labels| emission matrix; row l scores line l independently.
Eigen::MatrixXd note_emissions(const CrfModel& model, const CollatedNote& collated);

// log of the summed exponentiated scores over all |Y|^L label paths, where a
// path scores start + sum of emissions + sum of transitions + end. Log-space
// forward recursion with max-shifted log-sum-exp.
double log_partition(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                     const TransitionMatrix& transitions);

struct ViterbiPath {
    std::vector<int> labels;
    double score = 0.0;
};

// Max-score path under the same scoring as log_partition; ties prefer the
// lower label index at each backtracking decision.
ViterbiPath viterbi_decode(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                           const TransitionMatrix& transitions);

double path_score(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                  const TransitionMatrix& transitions, const std::vector<int>& path);

struct CrfGradients {
    Eigen::MatrixXd emissions;       // L x |Y|, expected minus observed
    Eigen::MatrixXd encoder_weights; // chained through the linear projection
    Eigen::MatrixXd transitions;
    Eigen::VectorXd start_scores;
    Eigen::VectorXd end_scores;
};

struct NllResult {
    double loss = 0.0;
    CrfGradients gradients;
};

// NLL = log_partition - gold path score, with gradients from
// forward-backward expected counts minus observed counts.
NllResult nll_and_gradient(const CrfModel& model, const CollatedNote& note);

struct CrfTrainConfig {
    std::size_t epochs = 10;
    double learning_rate = 0.05;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    std::size_t max_tokens = 100;
    std::size_t feature_space_size = std::size_t{1} << 20;
};

struct TrainedCrf {
    CrfModel model;
    std::vector<double> nll_trace; // mean NLL over the dataset after each epoch
};

// One note per gradient step (B = 1), seeded shuffle per epoch, zero init.
TrainedCrf train_crf(const std::vector<LabeledNote>& dataset, const LabelSet& label_set,
                     const CrfTrainConfig& config);

std::vector<std::string> predict_note(const CrfModel& model, const Note& note,
                                      std::size_t max_tokens);

} // namespace sectionseg
