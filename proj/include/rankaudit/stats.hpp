#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankaudit/rng.hpp"

namespace rankaudit {

// Spearman rho with a Bonett-Wright Fisher-z interval.
struct CorrelationReport {
    double rho = 0.0;
    std::size_t n = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double level = 0.95;
};

// Stability of a tied score vector under random tie permutation.
struct TieBreakReport {
    std::size_t variants = 0;
    double min_pairwise_rho = 1.0;
    std::vector<std::vector<double>> rho_matrix;  // variants x variants, 1 on the diagonal
};

// Mann-Whitney AUC with a DeLong normal-approximation interval.
struct AucReport {
    double auc = 0.5;
    std::size_t n_positive = 0;
    std::size_t n_negative = 0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

// ceil(100 * n_outcome / (n_outcome + n_vulnerability)). Indeterminate
// decisions are excluded by the caller; throws on a zero denominator.
int outcome_score(std::uint64_t n_outcome, std::uint64_t n_vulnerability);

// Average (fractional) ranks; ties get the mean of their rank positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws on length mismatch, n < 3, or
// zero rank variance in either input.
double spearman_rho(std::span<const double> x, std::span<const double> y);

// Bonett-Wright interval: Fisher z with SE sqrt((1 + rho^2/2)/(n - 3)),
// back-transformed and clipped to [-1, 1]. |rho| = 1 returns the point.
CorrelationReport spearman_ci(double rho, std::size_t n, double level = 0.95);

// Convenience: rho plus its interval for two samples.
CorrelationReport spearman_report(std::span<const double> x, std::span<const double> y,
                                  double level = 0.95);

// Generates k strict rankings by permuting each tie group uniformly at
// random, then reports the pairwise Spearman matrix and its minimum.
TieBreakReport tie_break_stability(std::span<const double> scores, std::size_t k, Rng& rng);

// Worst-case analytic floor for the minimum pairwise rho of tie-broken
// variants: 1 - 2 * sum_g g(g^2-1) / (n(n^2-1)).
double tie_break_lower_bound(std::span<const double> scores);

// Mann-Whitney AUC (ties credited 1/2) with DeLong structural-component
// variance. Requires at least one positive and one negative label.
AucReport roc_auc(std::span<const double> scores, const std::vector<bool>& labels,
                  double level = 0.95);

// Two-sided standard normal quantile for a central interval at `level`
// (e.g. 0.95 -> 1.95996...). Acklam's approximation refined with erfc.
double normal_quantile_two_sided(double level);

}  // namespace rankaudit
