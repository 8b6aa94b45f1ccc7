#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "rankaudit/stats.hpp"
#include "rankaudit/synth.hpp"

using namespace rankaudit;

TEST_CASE("gen_cohort with a fixed seed is fully reproducible") {
    SyntheticCohortSpec spec;
    spec.n_items = 25;
    spec.n_questions = 4;
    spec.seed = 991;
    const SyntheticCohort a = gen_cohort(spec);
    const SyntheticCohort b = gen_cohort(spec);
    REQUIRE(a.dataset.items.size() == b.dataset.items.size());
    for (std::size_t i = 0; i < a.dataset.items.size(); ++i) {
        CHECK(item_to_line(a.dataset.items[i]) == item_to_line(b.dataset.items[i]));
    }
    CHECK(a.oracle.strengths == b.oracle.strengths);
    CHECK(a.service_labels == b.service_labels);
}

TEST_CASE("constant strengths give exactly even win probabilities") {
    SyntheticCohortSpec spec;
    spec.n_items = 6;
    spec.strength_distribution = StrengthDistribution::constant;
    spec.seed = 2;
    const SyntheticCohort cohort = gen_cohort(spec);
    const auto& ids = cohort.dataset.items;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            CHECK(btl_win_probability(cohort.oracle, ids[i].item_id, ids[j].item_id) ==
                  doctest::Approx(0.5));
        }
    }
}

TEST_CASE("geometric ladder with ratio 3 gives adjacent win probability 0.75") {
    SyntheticCohortSpec spec;
    spec.n_items = 5;
    spec.strength_distribution = StrengthDistribution::geometric_ladder;
    spec.ladder_ratio = 3.0;
    spec.seed = 3;
    const SyntheticCohort cohort = gen_cohort(spec);
    for (std::size_t i = 0; i + 1 < 5; ++i) {
        const std::string& lo = cohort.dataset.items[i].item_id;
        const std::string& hi = cohort.dataset.items[i + 1].item_id;
        CHECK(btl_win_probability(cohort.oracle, hi, lo) == doctest::Approx(0.75));
    }
}

TEST_CASE("noiseless top-quartile labels are perfectly separable by strength") {
    SyntheticCohortSpec spec;
    spec.n_items = 40;
    spec.label_noise = 0.0;
    spec.label_top_quantile = 0.25;
    spec.seed = 17;
    const SyntheticCohort cohort = gen_cohort(spec);
    std::vector<double> theta;
    std::vector<bool> labels(cohort.service_labels.begin(), cohort.service_labels.end());
    for (const auto& item : cohort.dataset.items) {
        theta.push_back(cohort.oracle.strengths.at(item.item_id));
    }
    const AucReport rep = roc_auc(theta, labels);
    CHECK(rep.auc == doctest::Approx(1.0));
    std::size_t n_pos = 0;
    for (bool b : labels) n_pos += b ? 1 : 0;
    CHECK(n_pos == 10);  // round(0.25 * 40)
}

TEST_CASE("baseline score is rank-equivalent to strength when the tie quantum is zero") {
    SyntheticCohortSpec spec;
    spec.n_items = 30;
    spec.seed = 23;
    const SyntheticCohort cohort = gen_cohort(spec);
    std::vector<double> theta;
    for (const auto& item : cohort.dataset.items) {
        theta.push_back(cohort.oracle.strengths.at(item.item_id));
    }
    CHECK(spearman_rho(cohort.baseline_scores, theta) == doctest::Approx(1.0));
}

TEST_CASE("a positive tie quantum introduces ties in the baseline") {
    SyntheticCohortSpec spec;
    spec.n_items = 50;
    spec.baseline_tie_quantum = 0.5;
    spec.seed = 31;
    const SyntheticCohort cohort = gen_cohort(spec);
    std::map<double, int> counts;
    for (double v : cohort.baseline_scores) ++counts[v];
    bool any_tie = false;
    for (const auto& [v, c] : counts) {
        (void)v;
        if (c > 1) any_tie = true;
    }
    CHECK(any_tie);
}

TEST_CASE("label noise flips labels at roughly the requested rate") {
    SyntheticCohortSpec clean_spec;
    clean_spec.n_items = 400;
    clean_spec.seed = 7;
    SyntheticCohortSpec noisy_spec = clean_spec;
    noisy_spec.label_noise = 0.3;
    const SyntheticCohort clean = gen_cohort(clean_spec);
    const SyntheticCohort noisy = gen_cohort(noisy_spec);
    std::size_t flips = 0;
    for (std::size_t i = 0; i < clean.service_labels.size(); ++i) {
        if (clean.service_labels[i] != noisy.service_labels[i]) ++flips;
    }
    const double rate = static_cast<double>(flips) / 400.0;
    CHECK(rate > 0.2);
    CHECK(rate < 0.4);
}

TEST_CASE("planted feature weights are recoverable from the true ranking") {
    SyntheticCohortSpec spec;
    spec.n_items = 80;
    spec.n_questions = 6;
    spec.answers_per_question = 3;
    spec.strength_distribution = StrengthDistribution::constant;
    spec.planted_features = {{"q1", "a1", 1.5}, {"q3", "a2", -1.2}};
    spec.seed = 47;
    const SyntheticCohort cohort = gen_cohort(spec);
    // log-theta equals the planted weight sum exactly under a constant base.
    for (std::size_t i = 0; i < cohort.dataset.items.size(); ++i) {
        const auto& item = cohort.dataset.items[i];
        double expected = 0.0;
        for (const auto& qa : item.answers) {
            for (const auto& pf : spec.planted_features) {
                if (pf.question_id == qa.question_id && pf.answer == qa.answer) {
                    expected += pf.weight;
                }
            }
        }
        CHECK(std::log(cohort.oracle.strengths.at(item.item_id)) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("gen_tied_scores produces the exact requested tie structure") {
    Rng rng(5);
    const auto scores = gen_tied_scores(5, {2}, rng);
    REQUIRE(scores.size() == 5);
    std::map<double, int> counts;
    for (double v : scores) ++counts[v];
    int pairs = 0, singles = 0;
    for (const auto& [v, c] : counts) {
        (void)v;
        if (c == 2) ++pairs;
        else if (c == 1) ++singles;
        else FAIL("unexpected group size");
    }
    CHECK(pairs == 1);
    CHECK(singles == 3);
}

TEST_CASE("gen_tied_scores: all-tied boundary and infeasible groups") {
    Rng rng(6);
    const auto all_tied = gen_tied_scores(7, {7}, rng);
    for (double v : all_tied) CHECK(v == all_tied[0]);
    CHECK_THROWS_AS(gen_tied_scores(4, {3, 3}, rng), std::invalid_argument);
    CHECK_THROWS_AS(gen_tied_scores(4, {1}, rng), std::invalid_argument);
}

TEST_CASE("gen_tied_scores supports the large stability-test structure") {
    // ~30% of 325 items in tie groups of size <= 8.
    std::vector<std::size_t> groups;
    for (int i = 0; i < 8; ++i) groups.push_back(8);
    for (int i = 0; i < 6; ++i) groups.push_back(4);
    for (int i = 0; i < 5; ++i) groups.push_back(2);
    std::size_t tied = 0;
    for (auto g : groups) tied += g;
    CHECK(tied == 98);

    Rng rng(7);
    const auto scores = gen_tied_scores(325, groups, rng);
    std::map<double, int> counts;
    for (double v : scores) ++counts[v];
    std::map<int, int> histogram;
    for (const auto& [v, c] : counts) {
        (void)v;
        ++histogram[c];
    }
    CHECK(histogram[8] == 8);
    CHECK(histogram[4] == 6);
    CHECK(histogram[2] == 5);
    CHECK(histogram[1] == 325 - 98);
}

TEST_CASE("spec validation rejects bad parameters") {
    SyntheticCohortSpec spec;
    spec.n_items = 1;
    CHECK_THROWS_AS(gen_cohort(spec), std::invalid_argument);
    spec.n_items = 10;
    spec.answers_per_question = 1;
    CHECK_THROWS_AS(gen_cohort(spec), std::invalid_argument);
    spec.answers_per_question = 3;
    spec.planted_features = {{"zzz", "a1", 1.0}};
    CHECK_THROWS_AS(gen_cohort(spec), std::invalid_argument);
}
