#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sectionseg {

struct EmbeddingProviderConfig {
    std::string base_url; // falls back to SECTIONSEG_API_BASE
    std::string model_name;
    std::size_t embed_dim = 0;
    int timeout_ms = 30000;
    int max_in_flight = 4;
    std::size_t batch_size = 64; // lines per request
};

std::string embed_request_body(const EmbeddingProviderConfig& config,
                               const std::vector<std::string>& lines);

// POSTs {base_url}/v1/embeddings per batch (at most max_in_flight batches in
// flight) and returns one vector per input line, in input order. Each request
// is retried once on transient failure. Wrong-dimension replies raise
// DimensionMismatch; unreachable endpoints raise TransportError.
std::vector<Eigen::VectorXd> remote_embed(const EmbeddingProviderConfig& config,
                                          const std::vector<std::string>& lines);

} // namespace sectionseg
