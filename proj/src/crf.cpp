#include "sectionseg/crf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sectionseg/errors.hpp"
#include "sectionseg/numeric.hpp"
#include "sectionseg/rng.hpp"

namespace sectionseg {

TransitionMatrix TransitionMatrix::zeros(std::size_t num_labels) {
    const auto n = static_cast<Eigen::Index>(num_labels);
    return TransitionMatrix{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n),
                            Eigen::VectorXd::Zero(n)};
}

namespace {

CollatedNote collate_lines(std::string note_id, const std::vector<std::string>& lines,
                           std::optional<std::vector<std::string>> gold,
                           std::size_t max_tokens) {
    if (lines.empty()) throw EmptyNote("collate: note '" + note_id + "' has no lines");
    CollatedNote out;
    out.note_id = std::move(note_id);
    out.line_count = lines.size();
    out.token_budget = max_tokens;
    out.raw_lines = lines;
    out.tokens.reserve(lines.size());
    for (const std::string& line : lines) {
        out.tokens.push_back(tokenize_and_truncate(line, max_tokens));
    }
    out.gold = std::move(gold);
    return out;
}

} // namespace

CollatedNote collate(const Note& note, std::size_t max_tokens) {
    return collate_lines(note.note_id, note.lines, std::nullopt, max_tokens);
}

CollatedNote collate(const LabeledNote& note, std::size_t max_tokens) {
    return collate_lines(note.note_id, note.lines, note.labels, max_tokens);
}

Eigen::MatrixXd note_emissions(const CrfModel& model, const CollatedNote& collated) {
    const auto num_labels = static_cast<Eigen::Index>(model.label_set.size());
    Eigen::MatrixXd emissions(static_cast<Eigen::Index>(collated.line_count), num_labels);
    FeatureConfig config = model.encoder.features;
    config.max_tokens = collated.token_budget;
    for (std::size_t l = 0; l < collated.line_count; ++l) {
        const FeatureVector features =
            extract_features(collated.raw_lines[l], l, collated.line_count, config);
        emissions.row(static_cast<Eigen::Index>(l)) =
            emission_scores(model.encoder, features).transpose();
    }
    return emissions;
}

namespace {

// Forward pass in log space; alphas(l, y) is the log-sum over paths ending in
// label y at line l (start scores folded into row 0).
Eigen::MatrixXd forward_lattice(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                                const TransitionMatrix& transitions) {
    const Eigen::Index lines = emissions.rows();
    const Eigen::Index labels = emissions.cols();
    Eigen::MatrixXd alphas(lines, labels);
    alphas.row(0) = emissions.row(0) + transitions.start_scores.transpose();
    for (Eigen::Index l = 1; l < lines; ++l) {
        for (Eigen::Index y = 0; y < labels; ++y) {
            alphas(l, y) = emissions(l, y) +
                           log_sum_exp(alphas.row(l - 1).transpose() + transitions.scores.col(y));
        }
    }
    return alphas;
}

Eigen::MatrixXd backward_lattice(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                                 const TransitionMatrix& transitions) {
    const Eigen::Index lines = emissions.rows();
    const Eigen::Index labels = emissions.cols();
    Eigen::MatrixXd betas(lines, labels);
    betas.row(lines - 1) = transitions.end_scores.transpose();
    for (Eigen::Index l = lines - 2; l >= 0; --l) {
        const Eigen::VectorXd next =
            emissions.row(l + 1).transpose() + betas.row(l + 1).transpose();
        for (Eigen::Index y = 0; y < labels; ++y) {
            betas(l, y) = log_sum_exp(transitions.scores.row(y).transpose() + next);
        }
    }
    return betas;
}

void check_shapes(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                  const TransitionMatrix& transitions) {
    if (emissions.rows() < 1) throw EmptyNote("crf: emission matrix has no rows");
    if (emissions.cols() != transitions.scores.rows() ||
        emissions.cols() != transitions.scores.cols() ||
        emissions.cols() != transitions.start_scores.size() ||
        emissions.cols() != transitions.end_scores.size()) {
        throw DimensionMismatch("crf: emission/transition label dimensions disagree");
    }
}

} // namespace

double log_partition(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                     const TransitionMatrix& transitions) {
    check_shapes(emissions, transitions);
    const Eigen::MatrixXd alphas = forward_lattice(emissions, transitions);
    return log_sum_exp(alphas.row(emissions.rows() - 1).transpose() + transitions.end_scores);
}

double path_score(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                  const TransitionMatrix& transitions, const std::vector<int>& path) {
    check_shapes(emissions, transitions);
    if (static_cast<Eigen::Index>(path.size()) != emissions.rows()) {
        throw LengthMismatch("path_score: path length != line count");
    }
    double score = transitions.start_scores(path.front()) + transitions.end_scores(path.back());
    for (std::size_t l = 0; l < path.size(); ++l) {
        score += emissions(static_cast<Eigen::Index>(l), path[l]);
        if (l + 1 < path.size()) score += transitions.scores(path[l], path[l + 1]);
    }
    return score;
}

ViterbiPath viterbi_decode(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                           const TransitionMatrix& transitions) {
    check_shapes(emissions, transitions);
    const Eigen::Index lines = emissions.rows();
    const Eigen::Index labels = emissions.cols();

    Eigen::MatrixXd best(lines, labels);
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> backptr(lines, labels);
    best.row(0) = emissions.row(0) + transitions.start_scores.transpose();
    for (Eigen::Index l = 1; l < lines; ++l) {
        for (Eigen::Index y = 0; y < labels; ++y) {
            const Eigen::VectorXd candidates =
                best.row(l - 1).transpose() + transitions.scores.col(y);
            const int arg = argmax_lowest(candidates);
            backptr(l, y) = arg;
            best(l, y) = emissions(l, y) + candidates(arg);
        }
    }

    ViterbiPath out;
    out.labels.resize(static_cast<std::size_t>(lines));
    const Eigen::VectorXd finals = best.row(lines - 1).transpose() + transitions.end_scores;
    int state = argmax_lowest(finals);
    for (Eigen::Index l = lines - 1; l >= 0; --l) {
        out.labels[static_cast<std::size_t>(l)] = state;
        if (l > 0) state = backptr(l, state);
    }
    out.score = path_score(emissions, transitions, out.labels);
    return out;
}

namespace {

struct ForwardBackward {
    double log_z = 0.0;
    Eigen::MatrixXd unary;         // L x Y posterior marginals
    Eigen::MatrixXd pairwise_sum;  // Y x Y expected transition counts
};

ForwardBackward run_forward_backward(const Eigen::Ref<const Eigen::MatrixXd>& emissions,
                                     const TransitionMatrix& transitions) {
    const Eigen::Index lines = emissions.rows();
    const Eigen::Index labels = emissions.cols();
    const Eigen::MatrixXd alphas = forward_lattice(emissions, transitions);
    const Eigen::MatrixXd betas = backward_lattice(emissions, transitions);

    ForwardBackward fb;
    fb.log_z = log_sum_exp(alphas.row(lines - 1).transpose() + transitions.end_scores);
    fb.unary = (alphas + betas).array() - fb.log_z;
    fb.unary = fb.unary.array().exp();
    fb.pairwise_sum = Eigen::MatrixXd::Zero(labels, labels);
    for (Eigen::Index l = 0; l + 1 < lines; ++l) {
        // log p(y_l = i, y_{l+1} = j)
        const Eigen::VectorXd left = alphas.row(l).transpose();
        const Eigen::VectorXd right =
            emissions.row(l + 1).transpose() + betas.row(l + 1).transpose();
        fb.pairwise_sum +=
            ((left.replicate(1, labels) + transitions.scores + right.transpose().replicate(labels, 1))
                 .array() -
             fb.log_z)
                .exp()
                .matrix();
    }
    return fb;
}

std::vector<int> gold_indices(const CrfModel& model, const CollatedNote& note) {
    if (!note.gold.has_value()) {
        throw MissingGold("nll_and_gradient: note '" + note.note_id + "' has no gold labels");
    }
    std::vector<int> gold;
    gold.reserve(note.gold->size());
    for (const std::string& label : *note.gold) {
        const int index = model.label_set.index_of(label);
        if (index < 0) {
            throw UnknownLabel("nll_and_gradient: gold label '" + label + "' not in label set");
        }
        gold.push_back(index);
    }
    return gold;
}

} // namespace

NllResult nll_and_gradient(const CrfModel& model, const CollatedNote& note) {
    if (model.encoder.kind != EncoderKind::feature_linear) {
        throw UsageError("nll_and_gradient: CRF training requires the feature_linear encoder");
    }
    const std::vector<int> gold = gold_indices(model, note);
    const Eigen::MatrixXd emissions = note_emissions(model, note);
    const ForwardBackward fb = run_forward_backward(emissions, model.transitions);

    NllResult out;
    out.loss = fb.log_z - path_score(emissions, model.transitions, gold);

    const Eigen::Index lines = emissions.rows();
    const Eigen::Index labels = emissions.cols();
    CrfGradients& g = out.gradients;
    g.emissions = fb.unary;
    for (Eigen::Index l = 0; l < lines; ++l) g.emissions(l, gold[l]) -= 1.0;

    g.transitions = fb.pairwise_sum;
    for (std::size_t l = 0; l + 1 < gold.size(); ++l) g.transitions(gold[l], gold[l + 1]) -= 1.0;

    g.start_scores = fb.unary.row(0).transpose();
    g.start_scores(gold.front()) -= 1.0;
    g.end_scores = fb.unary.row(lines - 1).transpose();
    g.end_scores(gold.back()) -= 1.0;

    // Chain rule through emission(l, y) = w_y . phi_l.
    g.encoder_weights = Eigen::MatrixXd::Zero(labels, model.encoder.weights.cols());
    FeatureConfig config = model.encoder.features;
    config.max_tokens = note.token_budget;
    for (Eigen::Index l = 0; l < lines; ++l) {
        const FeatureVector features = extract_features(
            note.raw_lines[static_cast<std::size_t>(l)], static_cast<std::size_t>(l),
            note.line_count, config);
        for (const auto& [index, weight] : features.entries) {
            g.encoder_weights.col(index) += weight * g.emissions.row(l).transpose();
        }
    }
    return out;
}

TrainedCrf train_crf(const std::vector<LabeledNote>& dataset, const LabelSet& label_set,
                     const CrfTrainConfig& config) {
    if (dataset.empty()) throw EmptyTrainingSet("train_crf: empty training set");

    const FeatureConfig features{config.feature_space_size, config.max_tokens};
    TrainedCrf out;
    out.model.encoder = EncoderParams::feature_linear_zeros(label_set.size(), features);
    out.model.transitions = TransitionMatrix::zeros(label_set.size());
    out.model.label_set = label_set;

    // Features and gold indices are fixed across epochs; extract once.
    struct PreparedNote {
        std::vector<FeatureVector> features;
        std::vector<int> gold;
    };
    std::vector<PreparedNote> prepared;
    prepared.reserve(dataset.size());
    for (const LabeledNote& note : dataset) {
        if (note.lines.empty()) throw EmptyNote("train_crf: note '" + note.note_id + "' is empty");
        if (note.lines.size() != note.labels.size()) {
            throw LengthMismatch("train_crf: note '" + note.note_id + "' lines/labels mismatch");
        }
        PreparedNote p;
        for (std::size_t l = 0; l < note.lines.size(); ++l) {
            p.features.push_back(
                extract_features(note.lines[l], l, note.lines.size(), features));
            const int gold = label_set.index_of(note.labels[l]);
            if (gold < 0) {
                throw UnknownLabel("train_crf: label '" + note.labels[l] + "' not in label set");
            }
            p.gold.push_back(gold);
        }
        prepared.push_back(std::move(p));
    }

    const auto num_labels = static_cast<Eigen::Index>(label_set.size());
    Eigen::MatrixXd& weights = out.model.encoder.weights;
    TransitionMatrix& trans = out.model.transitions;

    const auto emissions_of = [&](const PreparedNote& p) {
        Eigen::MatrixXd emissions(static_cast<Eigen::Index>(p.features.size()), num_labels);
        for (std::size_t l = 0; l < p.features.size(); ++l) {
            Eigen::VectorXd scores = Eigen::VectorXd::Zero(num_labels);
            for (const auto& [index, weight] : p.features[l].entries) {
                scores += weight * weights.col(index);
            }
            emissions.row(static_cast<Eigen::Index>(l)) = scores.transpose();
        }
        return emissions;
    };

    Rng rng = seeded_rng(config.seed);
    std::vector<std::size_t> order(prepared.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        seeded_shuffle(order, rng);
        for (const std::size_t index : order) {
            const PreparedNote& p = prepared[index];
            const Eigen::MatrixXd emissions = emissions_of(p);
            const ForwardBackward fb = run_forward_backward(emissions, trans);

            Eigen::MatrixXd emission_grad = fb.unary;
            for (std::size_t l = 0; l < p.gold.size(); ++l) {
                emission_grad(static_cast<Eigen::Index>(l), p.gold[l]) -= 1.0;
            }
            Eigen::MatrixXd transition_grad = fb.pairwise_sum;
            for (std::size_t l = 0; l + 1 < p.gold.size(); ++l) {
                transition_grad(p.gold[l], p.gold[l + 1]) -= 1.0;
            }

            const double decay = 1.0 - config.learning_rate * config.l2;
            weights *= decay;
            trans.scores *= decay;
            trans.start_scores *= decay;
            trans.end_scores *= decay;

            for (std::size_t l = 0; l < p.features.size(); ++l) {
                const Eigen::VectorXd step =
                    config.learning_rate * emission_grad.row(static_cast<Eigen::Index>(l)).transpose();
                for (const auto& [findex, fweight] : p.features[l].entries) {
                    weights.col(findex) -= fweight * step;
                }
            }
            trans.scores -= config.learning_rate * transition_grad;
            Eigen::VectorXd start_grad = fb.unary.row(0).transpose();
            start_grad(p.gold.front()) -= 1.0;
            Eigen::VectorXd end_grad = fb.unary.row(fb.unary.rows() - 1).transpose();
            end_grad(p.gold.back()) -= 1.0;
            trans.start_scores -= config.learning_rate * start_grad;
            trans.end_scores -= config.learning_rate * end_grad;
        }

        double total_nll = 0.0;
        for (const PreparedNote& p : prepared) {
            const Eigen::MatrixXd emissions = emissions_of(p);
            total_nll += log_partition(emissions, trans) - path_score(emissions, trans, p.gold);
        }
        out.nll_trace.push_back(total_nll / static_cast<double>(prepared.size()));
    }
    return out;
}

std::vector<std::string> predict_note(const CrfModel& model, const Note& note,
                                      std::size_t max_tokens) {
    const CollatedNote collated = collate(note, max_tokens);
    const Eigen::MatrixXd emissions = note_emissions(model, collated);
    const ViterbiPath path = viterbi_decode(emissions, model.transitions);
    std::vector<std::string> labels;
    labels.reserve(path.labels.size());
    for (const int index : path.labels) {
        labels.push_back(model.label_set.label_at(static_cast<std::size_t>(index)));
    }
    return labels;
}

} // namespace sectionseg
