#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "rankaudit/attribution.hpp"
#include "rankaudit/rng.hpp"
#include "rankaudit/synth.hpp"

using namespace rankaudit;

namespace {

CohortDataset two_item_yes_no() {
    CohortDataset ds;
    ds.cohort_id = "mini";
    ds.schema = {"q1"};
    ItemProfile a;
    a.item_id = "a";
    a.answers = {{"q1", "Q", "yes"}};
    ItemProfile b;
    b.item_id = "b";
    b.answers = {{"q1", "Q", "no"}};
    ds.items = {a, b};
    return ds;
}

// Random one-hot instance for gradient and convexity checks.
struct SmallInstance {
    FeatureMatrix X;
    std::vector<int> levels;
    std::size_t n_levels;
};

SmallInstance random_instance(std::uint64_t seed, std::size_t n_items,
                              const std::vector<std::size_t>& block_sizes,
                              std::size_t n_levels) {
    Rng rng(seed);
    SmallInstance inst;
    inst.X.n_items = n_items;
    std::size_t f = 0;
    for (std::size_t q = 0; q < block_sizes.size(); ++q) {
        const std::size_t begin = f;
        for (std::size_t a = 0; a < block_sizes[q]; ++a, ++f) {
            inst.X.feature_names.push_back("q" + std::to_string(q) + " = a" + std::to_string(a));
        }
        inst.X.blocks.emplace_back(begin, f);
    }
    inst.X.n_features = f;
    inst.X.cells.assign(n_items * f, 0);
    for (std::size_t i = 0; i < n_items; ++i) {
        inst.X.item_ids.push_back("item" + std::to_string(i));
        for (std::size_t q = 0; q < block_sizes.size(); ++q) {
            const auto [begin, end] = inst.X.blocks[q];
            const std::size_t pick = begin + rng.next_below(end - begin);
            inst.X.cells[i * f + pick] = 1;
        }
    }
    inst.n_levels = n_levels;
    for (std::size_t i = 0; i < n_items; ++i) {
        inst.levels.push_back(static_cast<int>(rng.next_below(n_levels)));
    }
    // Levels must reach the top so the threshold count matches n_levels - 1.
    inst.levels[0] = static_cast<int>(n_levels - 1);
    return inst;
}

}  // namespace

TEST_CASE("encode_features: yes/no question, lexicographic column order") {
    const FeatureMatrix X = encode_features(two_item_yes_no());
    REQUIRE(X.n_features == 2);
    CHECK(X.feature_names[0] == "q1 = no");
    CHECK(X.feature_names[1] == "q1 = yes");
    CHECK(X.at(0, 1) == 1);  // item a answered yes
    CHECK(X.at(0, 0) == 0);
    CHECK(X.at(1, 0) == 1);  // item b answered no
    CHECK(X.at(1, 1) == 0);
}

TEST_CASE("encode_features: No answer is a first-class feature column") {
    CohortDataset ds = two_item_yes_no();
    ds.items[1].answers[0].answer = kNoAnswer;
    const FeatureMatrix X = encode_features(ds);
    const auto it = std::find(X.feature_names.begin(), X.feature_names.end(),
                              std::string("q1 = ") + kNoAnswer);
    REQUIRE(it != X.feature_names.end());
    const std::size_t col = static_cast<std::size_t>(it - X.feature_names.begin());
    CHECK(X.at(1, col) == 1);
}

TEST_CASE("encode_features: every row sums to the question count (one-hot per block)") {
    SyntheticCohortSpec spec;
    spec.n_items = 30;
    spec.n_questions = 6;
    spec.answers_per_question = 4;
    spec.seed = 5;
    const SyntheticCohort cohort = gen_cohort(spec);
    const FeatureMatrix X = encode_features(cohort.dataset);
    for (std::size_t i = 0; i < X.n_items; ++i) {
        std::size_t row_sum = 0;
        for (std::size_t f = 0; f < X.n_features; ++f) row_sum += X.at(i, f);
        CHECK(row_sum == 6);
        // one-hot completeness per block
        for (const auto& [begin, end] : X.blocks) {
            std::size_t block_sum = 0;
            for (std::size_t f = begin; f < end; ++f) block_sum += X.at(i, f);
            CHECK(block_sum == 1);
        }
    }
}

TEST_CASE("all-thresholds gradient matches central finite differences") {
    const SmallInstance inst = random_instance(21, 20, {4, 3, 3}, 6);
    const std::size_t dim = inst.X.n_features + inst.n_levels - 1;
    Rng rng(3);
    std::vector<double> params(dim);
    for (auto& p : params) p = rng.uniform(-1.0, 1.0);

    std::vector<double> grad(dim, 0.0);
    const double l2 = 1.0;
    all_thresholds_loss(inst.X, inst.levels, inst.n_levels, l2, params, grad);

    auto f = [&](std::span<const double> x) {
        std::vector<double> g(dim, 0.0);
        return all_thresholds_loss(inst.X, inst.levels, inst.n_levels, l2, x, g);
    };
    const auto fd = testing_oracles::central_difference_gradient(f, params, 1e-5);
    for (std::size_t i = 0; i < dim; ++i) {
        const double scale = std::max({1.0, std::fabs(grad[i]), std::fabs(fd[i])});
        CHECK(std::fabs(grad[i] - fd[i]) / scale < 1e-5);
    }
}

TEST_CASE("optimizer result is initialization-independent (convex loss)") {
    const SmallInstance inst = random_instance(77, 20, {4, 3, 3}, 5);
    const std::size_t dim = inst.X.n_features + inst.n_levels - 1;
    Objective objective = [&](std::span<const double> p, std::span<double> g) {
        return all_thresholds_loss(inst.X, inst.levels, inst.n_levels, 1.0, p, g);
    };
    LbfgsOptions opt;
    opt.grad_tol = 1e-8;
    opt.max_iterations = 5000;

    std::vector<std::vector<double>> solutions;
    Rng rng(1);
    for (int start = 0; start < 3; ++start) {
        std::vector<double> init(dim);
        for (auto& x : init) x = rng.uniform(-2.0, 2.0);
        const LbfgsResult res = lbfgs_minimize(objective, init, opt);
        REQUIRE(res.converged);
        solutions.push_back(res.x);
    }
    for (std::size_t s = 1; s < solutions.size(); ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(std::fabs(solutions[s][i] - solutions[0][i]) < 1e-4);
        }
    }
}

TEST_CASE("fit_ordinal: a planted feature dominates a noiseless monotone ranking") {
    SyntheticCohortSpec spec;
    spec.n_items = 60;
    spec.n_questions = 5;
    spec.answers_per_question = 3;
    spec.strength_distribution = StrengthDistribution::constant;
    spec.planted_features = {{"q1", "a1", 2.0}};
    spec.seed = 44;
    const SyntheticCohort cohort = gen_cohort(spec);

    // True strength order; ties broken deterministically by item id.
    std::vector<std::string> ids;
    for (const auto& item : cohort.dataset.items) ids.push_back(item.item_id);
    std::vector<double> theta;
    for (const auto& id : ids) theta.push_back(cohort.oracle.strengths.at(id));
    std::vector<std::size_t> order_idx(ids.size());
    std::iota(order_idx.begin(), order_idx.end(), 0);
    std::sort(order_idx.begin(), order_idx.end(), [&](std::size_t a, std::size_t b) {
        if (theta[a] != theta[b]) return theta[a] > theta[b];
        return ids[a] < ids[b];
    });
    std::vector<std::string> order;
    for (std::size_t idx : order_idx) order.push_back(ids[idx]);

    const FeatureMatrix X = encode_features(cohort.dataset);
    const AttributionModel model = fit_ordinal_to_ranking(X, order, 1.0);
    const auto top = top_features(model, 1);
    REQUIRE(top.size() == 1);
    CHECK(top[0].first == "q1 = a1");
    CHECK(top[0].second > 0.0);  // positive toward higher rank
    CHECK(std::fabs(top[0].second) == doctest::Approx(1.0));  // max-abs normalization
}

TEST_CASE("fit_ordinal: overwhelming L2 drives all coefficients to zero") {
    const SmallInstance inst = random_instance(5, 25, {3, 3}, 5);
    const AttributionModel model = fit_ordinal(inst.X, inst.levels, 1e6);
    for (double c : model.coefficients) CHECK(std::fabs(c) < 1e-4);
}

TEST_CASE("fit_ordinal: thresholds come out nondecreasing") {
    const SmallInstance inst = random_instance(13, 30, {4, 4}, 8);
    const AttributionModel model = fit_ordinal(inst.X, inst.levels, 1.0);
    for (std::size_t j = 1; j < model.thresholds.size(); ++j) {
        CHECK(model.thresholds[j] >= model.thresholds[j - 1]);
    }
    CHECK(model.thresholds.size() == 7);
}

TEST_CASE("fit_ordinal is invariant to permuting items together with their levels") {
    const SmallInstance inst = random_instance(9, 18, {3, 4}, 6);
    const AttributionModel base = fit_ordinal(inst.X, inst.levels, 1.0);

    SmallInstance permuted = inst;
    std::vector<std::size_t> perm(inst.X.n_items);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(2);
    rng.shuffle(perm);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        permuted.levels[i] = inst.levels[perm[i]];
        permuted.X.item_ids[i] = inst.X.item_ids[perm[i]];
        for (std::size_t f = 0; f < inst.X.n_features; ++f) {
            permuted.X.cells[i * inst.X.n_features + f] =
                inst.X.cells[perm[i] * inst.X.n_features + f];
        }
    }
    const AttributionModel shuffled = fit_ordinal(permuted.X, permuted.levels, 1.0);
    for (std::size_t f = 0; f < base.coefficients.size(); ++f) {
        CHECK(std::fabs(base.coefficients[f] - shuffled.coefficients[f]) < 1e-6);
    }
}

TEST_CASE("fit_ordinal: a constant feature column shrinks to zero") {
    // One question whose answer never varies: its single column is all ones.
    CohortDataset ds;
    ds.cohort_id = "const";
    ds.schema = {"q1", "q2"};
    for (int i = 0; i < 12; ++i) {
        ItemProfile item;
        item.item_id = "i" + std::to_string(10 + i);
        item.answers = {{"q1", "varies", i % 3 == 0 ? "x" : (i % 3 == 1 ? "y" : "z")},
                        {"q2", "constant", "same"}};
        ds.items.push_back(std::move(item));
    }
    const FeatureMatrix X = encode_features(ds);
    std::vector<std::string> order;
    for (const auto& item : ds.items) order.push_back(item.item_id);
    const AttributionModel model = fit_ordinal_to_ranking(X, order, 1.0);
    const auto it = std::find(model.feature_names.begin(), model.feature_names.end(),
                              "q2 = same");
    REQUIRE(it != model.feature_names.end());
    const std::size_t col = static_cast<std::size_t>(it - model.feature_names.begin());
    CHECK(std::fabs(model.coefficients[col]) < 1e-3);
}

TEST_CASE("top_features ordering, truncation, and tie-break") {
    AttributionModel model;
    model.feature_names = {"f1", "f2", "f3"};
    model.coefficients = {0.9, -0.5, 0.1};
    model.normalized_coefficients = {0.9, -0.5, 0.1};

    const auto top2 = top_features(model, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].first == "f1");
    CHECK(top2[0].second > 0.0);
    CHECK(top2[1].first == "f2");
    CHECK(top2[1].second < 0.0);

    const auto all = top_features(model, 3);
    CHECK(all.size() == 3);
    CHECK(top_features(model, 99).size() == 3);  // truncated

    AttributionModel tied;
    tied.feature_names = {"zeta", "alpha"};
    tied.coefficients = {0.5, -0.5};
    tied.normalized_coefficients = {0.5, -0.5};
    const auto t = top_features(tied, 2);
    CHECK(t[0].first == "alpha");  // name-lexicographic on equal magnitude
    CHECK(t[1].first == "zeta");
}

TEST_CASE("compare_attributions: identity, disjoint, and polarity disagreement") {
    AttributionModel a;
    a.feature_names = {"f1", "f2", "f3", "f4"};
    a.coefficients = {1.0, -0.8, 0.1, 0.05};
    a.normalized_coefficients = a.coefficients;

    const OverlapReport same = compare_attributions(a, a, 2);
    CHECK(same.overlap == 2);
    CHECK(same.polarity_disagreements == 0);

    AttributionModel b = a;
    b.normalized_coefficients = {0.01, 0.02, 0.9, -0.8};
    b.coefficients = b.normalized_coefficients;
    const OverlapReport disjoint = compare_attributions(a, b, 2);
    CHECK(disjoint.overlap == 0);

    AttributionModel c = a;
    c.normalized_coefficients = {-1.0, -0.8, 0.1, 0.05};
    c.coefficients = c.normalized_coefficients;
    const OverlapReport flipped = compare_attributions(a, c, 2);
    CHECK(flipped.overlap == 2);
    CHECK(flipped.polarity_disagreements == 1);  // f1 flips, f2 agrees

    AttributionModel other;
    other.feature_names = {"g1"};
    other.coefficients = {1.0};
    other.normalized_coefficients = {1.0};
    CHECK_THROWS_AS(compare_attributions(a, other, 2), std::invalid_argument);
}

TEST_CASE("levels_from_ranking validates and bins") {
    const FeatureMatrix X = encode_features(two_item_yes_no());
    const auto levels = levels_from_ranking(X, {"b", "a"});
    CHECK(levels[0] == 0);  // item a ranked last
    CHECK(levels[1] == 1);
    CHECK_THROWS_AS(levels_from_ranking(X, {"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(levels_from_ranking(X, {"a", "zzz"}), std::invalid_argument);
}
