#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankaudit/core.hpp"
#include "rankaudit/lbfgs.hpp"

namespace rankaudit {

// One-hot "question = answer" design matrix over a cohort. Within each
// question's block exactly one column is set per row; the answer vocabulary
// is whatever the cohort actually contains (including "No answer"). Columns
// are ordered by (schema order, answer lexicographic).
struct FeatureMatrix {
    std::vector<std::string> feature_names;             // "<question_id> = <answer>"
    std::vector<std::string> item_ids;                  // row order
    std::vector<std::uint8_t> cells;                    // n_items x n_features
    std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [begin, end) per question
    std::size_t n_items = 0;
    std::size_t n_features = 0;

    std::uint8_t at(std::size_t item, std::size_t feature) const {
        return cells[item * n_features + feature];
    }
    // Active column per question block for one item (one per block).
    std::vector<std::size_t> active_features(std::size_t item) const;
};

FeatureMatrix encode_features(const CohortDataset& dataset);

enum class CoefficientScaling { max_abs, l2 };

// All-thresholds ordinal logistic model over one-hot features.
struct AttributionModel {
    std::vector<std::string> feature_names;
    std::vector<double> coefficients;
    std::vector<double> normalized_coefficients;  // scaled to unit max-|.| (or unit L2)
    std::vector<double> thresholds;               // nondecreasing
    double l2_coefficient = 1.0;
    CoefficientScaling scaling = CoefficientScaling::max_abs;
    bool converged = true;
    int iterations = 0;
    double grad_inf_norm = 0.0;
};

struct FitOptions {
    int max_iterations = 2000;
    double grad_tol = 1e-6;
    CoefficientScaling scaling = CoefficientScaling::max_abs;
    int quantile_bins = 0;  // 0 keeps one ordinal level per rank position
};

// Ordinal level per item (0 = ranked last). `order_best_first` must be a
// permutation of the matrix's item ids.
std::vector<int> levels_from_ranking(const FeatureMatrix& X,
                                     const std::vector<std::string>& order_best_first,
                                     int quantile_bins = 0);

// All-thresholds loss and gradient at packed params [w (n_features), b
// (n_levels-1)]: for an item with level r and score s = w.x, boundaries below
// r penalize log(1+exp(-(s-b_j))) and boundaries at or above r penalize
// log(1+exp(s-b_j)); plus (l2/2)||w||^2. Exposed for the gradient tests.
double all_thresholds_loss(const FeatureMatrix& X, const std::vector<int>& levels,
                           std::size_t n_levels, double l2, std::span<const double> params,
                           std::span<double> grad);

// Deterministic fit: zero initialization, fixed iteration budget, relative
// gradient tolerance. Non-convergence is flagged, not thrown.
AttributionModel fit_ordinal(const FeatureMatrix& X, const std::vector<int>& levels, double l2,
                             const FitOptions& options = {});

AttributionModel fit_ordinal_to_ranking(const FeatureMatrix& X,
                                        const std::vector<std::string>& order_best_first,
                                        double l2, const FitOptions& options = {});

// k features of largest |normalized coefficient|, signed values preserved,
// ties broken by feature name; truncates when k exceeds the feature count.
std::vector<std::pair<std::string, double>> top_features(const AttributionModel& model,
                                                         std::size_t k);

struct OverlapReport {
    std::size_t k = 0;
    std::size_t overlap = 0;
    struct SharedFeature {
        std::string feature;
        double coefficient_a = 0.0;
        double coefficient_b = 0.0;
        bool sign_agreement = true;
    };
    std::vector<SharedFeature> shared;
    std::size_t polarity_agreements = 0;
    std::size_t polarity_disagreements = 0;
};

// Top-k overlap and polarity consistency between two models fitted on the
// same feature space (throws otherwise).
OverlapReport compare_attributions(const AttributionModel& a, const AttributionModel& b,
                                   std::size_t k);

std::string attribution_to_csv(const AttributionModel& model);

}  // namespace rankaudit
