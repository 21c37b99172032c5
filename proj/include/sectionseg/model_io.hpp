#pragma once

#include <string>

#include "sectionseg/crf.hpp"
#include "sectionseg/encoder.hpp"
#include "sectionseg/labels.hpp"

namespace sectionseg {

// Versioned JSON model envelope. Classifier files carry
//   {format_version, kind, label_set, encoder_kind, dims, config_fingerprint,
//    weights (row-major)}
// and CRF files add transitions (row-major), start_scores, end_scores.

struct ClassifierModelFile {
    EncoderParams params;
    LabelSet label_set;
    std::string config_fingerprint;
};

struct CrfModelFile {
    CrfModel model;
    std::string config_fingerprint;
};

void save_classifier_model(const std::string& path, const EncoderParams& params,
                           const LabelSet& label_set, const std::string& config_fingerprint);
ClassifierModelFile load_classifier_model(const std::string& path);

void save_crf_model(const std::string& path, const CrfModel& model,
                    const std::string& config_fingerprint);
CrfModelFile load_crf_model(const std::string& path);

// "classifier" or "crf" without loading the weights.
std::string peek_model_kind(const std::string& path);

} // namespace sectionseg
