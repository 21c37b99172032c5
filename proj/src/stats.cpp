#include "sectionseg/stats.hpp"

#include <algorithm>
#include <cmath>

#include "sectionseg/errors.hpp"
#include "sectionseg/rng.hpp"

namespace sectionseg {

std::string to_string(StatMethod method) {
    return method == StatMethod::exact ? "exact" : "normal_approx";
}

namespace {

// Average ranks of |d|, doubled so ties stay in exact integer arithmetic.
std::vector<std::uint64_t> doubled_ranks(const std::vector<double>& magnitudes) {
    const std::size_t n = magnitudes.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return magnitudes[a] < magnitudes[b];
    });
    std::vector<std::uint64_t> ranks2(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
        // ranks i+1 .. j+1 share the average; doubled average = (i+1) + (j+1)
        const std::uint64_t doubled_avg = static_cast<std::uint64_t>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks2[order[k]] = doubled_avg;
        i = j + 1;
    }
    return ranks2;
}

// Number of the 2^n sign assignments whose negative-rank sum is <= limit,
// counted with a subset-sum table over the doubled ranks.
double count_at_or_below(const std::vector<std::uint64_t>& ranks2, std::uint64_t limit) {
    std::uint64_t total = 0;
    for (const std::uint64_t r : ranks2) total += r;
    const std::uint64_t cap = std::min(limit, total);
    std::vector<double> table(static_cast<std::size_t>(cap) + 1, 0.0);
    table[0] = 1.0;
    for (const std::uint64_t r : ranks2) {
        for (std::size_t s = table.size(); s-- > 0;) {
            if (s >= r && table[s - r] != 0.0) table[s] += table[s - r];
        }
    }
    double count = 0.0;
    for (const double c : table) count += c;
    return count;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

} // namespace

StatTestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("wilcoxon_signed_rank: paired samples differ in length");
    }
    if (a.size() < 2) throw TooFewValues("wilcoxon_signed_rank: need at least 2 pairs");

    std::vector<double> magnitudes;
    std::vector<bool> negative;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d == 0.0) continue;
        magnitudes.push_back(std::fabs(d));
        negative.push_back(d < 0.0);
    }
    if (magnitudes.empty()) {
        throw DegenerateSample("wilcoxon_signed_rank: all differences are zero");
    }

    const std::size_t n = magnitudes.size();
    const std::vector<std::uint64_t> ranks2 = doubled_ranks(magnitudes);
    std::uint64_t w_minus2 = 0;
    std::uint64_t total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += ranks2[i];
        if (negative[i]) w_minus2 += ranks2[i];
    }
    const std::uint64_t w_plus2 = total2 - w_minus2;
    const std::uint64_t w2 = std::min(w_plus2, w_minus2);

    StatTestResult result;
    result.statistic = static_cast<double>(w2) / 2.0;
    result.n_effective = n;

    if (n <= 25) {
        result.method = StatMethod::exact;
        const double below = count_at_or_below(ranks2, w2);
        result.p_value = std::min(1.0, 2.0 * below / std::pow(2.0, static_cast<double>(n)));
    } else {
        result.method = StatMethod::normal_approx;
        const double nd = static_cast<double>(n);
        const double mean = nd * (nd + 1.0) / 4.0;
        double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
        // Tie correction: subtract sum(t^3 - t) / 48 over tie groups of |d|.
        std::vector<double> sorted = magnitudes;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            variance -= (t * t * t - t) / 48.0;
            i = j + 1;
        }
        const double w = static_cast<double>(w2) / 2.0;
        const double z = (w - mean + 0.5) / std::sqrt(variance);
        result.p_value = std::clamp(2.0 * normal_cdf(z), 0.0, 1.0);
    }
    return result;
}

std::pair<double, double> confidence_interval(const std::vector<double>& values, double level,
                                              std::uint64_t seed) {
    if (values.size() < 2) throw TooFewValues("confidence_interval: need at least 2 values");
    if (!(level > 0.0) || !(level < 1.0)) {
        throw UsageError("confidence_interval: level must be in (0, 1)");
    }

    Rng rng = seeded_rng(seed);
    const std::size_t n = values.size();
    std::vector<double> means;
    means.reserve(kBootstrapResamples);
    for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += values[uniform_index(rng, n)];
        }
        means.push_back(sum / static_cast<double>(n));
    }
    std::sort(means.begin(), means.end());

    const auto nearest_rank = [&](double p) {
        // ceil(p * B) with a guard against floating error on exact boundaries
        const double q = p * static_cast<double>(kBootstrapResamples);
        auto k = static_cast<std::size_t>(std::ceil(q - 1e-9));
        k = std::clamp<std::size_t>(k, 1, kBootstrapResamples);
        return means[k - 1];
    };
    const double alpha = (1.0 - level) / 2.0;
    return {nearest_rank(alpha), nearest_rank(1.0 - alpha)};
}

} // namespace sectionseg
