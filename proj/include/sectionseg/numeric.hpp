#pragma once

#include <cmath>

#include <Eigen/Core>

namespace sectionseg {

// Log-sum-exp with max shift; tolerates -inf entries (empty mass).
template <typename Derived>
double log_sum_exp(const Eigen::MatrixBase<Derived>& scores) {
    const double shift = scores.maxCoeff();
    if (!std::isfinite(shift)) return shift;
    return shift + std::log((scores.array() - shift).exp().sum());
}

template <typename Derived>
Eigen::VectorXd softmax(const Eigen::MatrixBase<Derived>& scores) {
    const double shift = scores.maxCoeff();
    Eigen::VectorXd exps = (scores.array() - shift).exp();
    return exps / exps.sum();
}

// First index attaining the maximum: deterministic tie-break by lowest index.
template <typename Derived>
int argmax_lowest(const Eigen::MatrixBase<Derived>& scores) {
    int best = 0;
    for (int i = 1; i < scores.size(); ++i) {
        if (scores(i) > scores(best)) best = i;
    }
    return best;
}

} // namespace sectionseg
