#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankaudit/btl.hpp"
#include "rankaudit/core.hpp"
#include "rankaudit/rng.hpp"

namespace rankaudit {

// Links one answer category to a log-strength contribution.
struct PlantedFeature {
    std::string question_id;
    std::string answer;
    double weight = 0.0;
};

enum class StrengthDistribution { log_uniform, geometric_ladder, constant };

StrengthDistribution parse_strength_distribution(const std::string& s);
std::string to_string(StrengthDistribution d);

struct SyntheticCohortSpec {
    std::size_t n_items = 50;
    std::size_t n_questions = 10;
    std::size_t answers_per_question = 3;
    StrengthDistribution strength_distribution = StrengthDistribution::log_uniform;
    double strength_lo = 1.0;   // log-uniform lower bound
    double strength_hi = 10.0;  // log-uniform upper bound
    double ladder_ratio = 3.0;  // geometric ladder step between adjacent items
    std::vector<PlantedFeature> planted_features;
    double label_noise = 0.0;        // flip probability applied to service labels
    double label_top_quantile = 0.25;  // positives come from this top share of strengths
    double label_sharpness = 0.0;    // >0: logistic link on normalized rank; 0: hard threshold
    double baseline_tie_quantum = 0.0;  // >0 rounds baseline scores, creating ties
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticCohort {
    CohortDataset dataset;
    BtlOracle oracle;
    std::vector<double> baseline_scores;  // aligned with dataset.items
    std::vector<bool> service_labels;     // aligned with dataset.items
};

// Ground-truth-bearing cohort: log strength = log(base draw) + planted
// weights of the item's answers; baseline score is a monotone transform of
// strength (optionally quantized into ties); service labels follow the
// top-quantile rule (or a logistic link) flipped with label_noise.
SyntheticCohort gen_cohort(const SyntheticCohortSpec& spec);

// Score vector with exactly the requested tie structure; remaining entries
// are distinct. Throws when the group sizes cannot fit.
std::vector<double> gen_tied_scores(std::size_t n, const std::vector<std::size_t>& tie_groups,
                                    Rng& rng);

}  // namespace rankaudit
