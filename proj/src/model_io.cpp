#include "sectionseg/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "sectionseg/errors.hpp"

namespace sectionseg {

namespace {

constexpr int kFormatVersion = 1;

using ordered_json = nlohmann::ordered_json;

ordered_json matrix_row_major(const Eigen::MatrixXd& matrix) {
    ordered_json values = ordered_json::array();
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < matrix.cols(); ++c) values.push_back(matrix(r, c));
    }
    return values;
}

Eigen::MatrixXd matrix_from_row_major(const nlohmann::json& values, Eigen::Index rows,
                                      Eigen::Index cols) {
    if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
        throw DataError("model file: weight count " + std::to_string(values.size()) +
                        " != " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    Eigen::MatrixXd matrix(rows, cols);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) matrix(r, c) = values.at(i++).get<double>();
    }
    return matrix;
}

ordered_json vector_json(const Eigen::VectorXd& vec) {
    ordered_json values = ordered_json::array();
    for (Eigen::Index i = 0; i < vec.size(); ++i) values.push_back(vec(i));
    return values;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& values) {
    Eigen::VectorXd vec(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        vec(static_cast<Eigen::Index>(i)) = values.at(i).get<double>();
    }
    return vec;
}

ordered_json envelope(const std::string& kind, const EncoderParams& params,
                      const LabelSet& label_set, const std::string& fingerprint) {
    ordered_json file;
    file["format_version"] = kFormatVersion;
    file["kind"] = kind;
    file["label_set"] = {{"name", label_set.name()}, {"labels", label_set.labels()}};
    file["encoder_kind"] = to_string(params.kind);
    ordered_json dims;
    dims["labels"] = label_set.size();
    dims["input"] = params.input_dim();
    if (params.kind == EncoderKind::feature_linear) {
        dims["max_tokens"] = params.features.max_tokens;
    }
    file["dims"] = std::move(dims);
    file["config_fingerprint"] = fingerprint;
    file["weights"] = matrix_row_major(params.weights);
    return file;
}

nlohmann::json read_envelope(const std::string& path, const std::string& expected_kind) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    nlohmann::json file;
    try {
        in >> file;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    if (file.value("format_version", -1) != kFormatVersion) {
        throw DataError("model file '" + path + "' has unsupported format_version");
    }
    if (file.at("kind").get<std::string>() != expected_kind) {
        throw DataError("model file '" + path + "' is a '" +
                        file.at("kind").get<std::string>() + "' model, expected '" +
                        expected_kind + "'");
    }
    return file;
}

std::pair<EncoderParams, LabelSet> decode_encoder(const nlohmann::json& file) {
    LabelSet label_set(file.at("label_set").at("name").get<std::string>(),
                       file.at("label_set").at("labels").get<std::vector<std::string>>());
    EncoderParams params;
    params.kind = encoder_kind_from_string(file.at("encoder_kind").get<std::string>());
    const auto labels = file.at("dims").at("labels").get<std::size_t>();
    const auto input = file.at("dims").at("input").get<std::size_t>();
    if (labels != label_set.size()) {
        throw DataError("model file: dims.labels disagrees with the label set");
    }
    if (params.kind == EncoderKind::feature_linear) {
        params.features.feature_space_size = input;
        params.features.max_tokens = file.at("dims").at("max_tokens").get<std::size_t>();
    } else {
        params.embed_dim = input;
    }
    params.weights = matrix_from_row_major(file.at("weights"),
                                           static_cast<Eigen::Index>(labels),
                                           static_cast<Eigen::Index>(input));
    return {std::move(params), std::move(label_set)};
}

} // namespace

void save_classifier_model(const std::string& path, const EncoderParams& params,
                           const LabelSet& label_set, const std::string& config_fingerprint) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << envelope("classifier", params, label_set, config_fingerprint).dump() << '\n';
}

ClassifierModelFile load_classifier_model(const std::string& path) {
    const nlohmann::json file = read_envelope(path, "classifier");
    auto [params, label_set] = decode_encoder(file);
    return ClassifierModelFile{std::move(params), std::move(label_set),
                               file.at("config_fingerprint").get<std::string>()};
}

void save_crf_model(const std::string& path, const CrfModel& model,
                    const std::string& config_fingerprint) {
    ordered_json file = envelope("crf", model.encoder, model.label_set, config_fingerprint);
    file["transitions"] = matrix_row_major(model.transitions.scores);
    file["start_scores"] = vector_json(model.transitions.start_scores);
    file["end_scores"] = vector_json(model.transitions.end_scores);
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << file.dump() << '\n';
}

CrfModelFile load_crf_model(const std::string& path) {
    const nlohmann::json file = read_envelope(path, "crf");
    auto [params, label_set] = decode_encoder(file);
    const auto n = static_cast<Eigen::Index>(label_set.size());
    CrfModel model;
    model.encoder = std::move(params);
    model.transitions.scores = matrix_from_row_major(file.at("transitions"), n, n);
    model.transitions.start_scores = vector_from_json(file.at("start_scores"));
    model.transitions.end_scores = vector_from_json(file.at("end_scores"));
    if (model.transitions.start_scores.size() != n || model.transitions.end_scores.size() != n) {
        throw DataError("model file: start/end score lengths disagree with the label set");
    }
    model.label_set = std::move(label_set);
    return CrfModelFile{std::move(model), file.at("config_fingerprint").get<std::string>()};
}

std::string peek_model_kind(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    nlohmann::json file;
    try {
        in >> file;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    return file.at("kind").get<std::string>();
}

} // namespace sectionseg
