#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sectionseg {

enum class StatMethod { exact, normal_approx };

std::string to_string(StatMethod method);

struct StatTestResult {
    double statistic = 0.0; // W = min(W+, W-)
    double p_value = 1.0;
    std::size_t n_effective = 0;
    StatMethod method = StatMethod::exact;
};

// Wilcoxon signed-rank test on paired samples. Zero differences are dropped,
// |d| ranks use average ranks for ties, and the statistic is min(W+, W-).
// Two-sided p: exact sign-assignment distribution (2^n, via subset-sum
// counting) when n_effective <= 25, otherwise a normal approximation with
// tie and continuity corrections. Throws DegenerateSample when every pair is
// equal.
StatTestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr std::size_t kBootstrapResamples = 10000;

// Nonparametric bootstrap CI of the mean: kBootstrapResamples seeded
// resamples, percentile method (nearest rank at (1-level)/2 tails).
std::pair<double, double> confidence_interval(const std::vector<double>& values, double level,
                                              std::uint64_t seed);

} // namespace sectionseg
