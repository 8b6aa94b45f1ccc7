#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rankaudit/rng.hpp"
#include "rankaudit/stats.hpp"

using namespace rankaudit;

TEST_CASE("outcome_score anchors and ceiling behaviour") {
    CHECK(outcome_score(10, 0) == 100);
    CHECK(outcome_score(0, 10) == 0);
    CHECK(outcome_score(1, 2) == 34);  // ceil(33.33...)
    CHECK_THROWS_AS(outcome_score(0, 0), std::invalid_argument);
}

TEST_CASE("outcome_score agrees with floating-point ceiling for all small counts") {
    for (std::uint64_t total = 1; total <= 10; ++total) {
        for (std::uint64_t a = 0; a <= total; ++a) {
            const std::uint64_t b = total - a;
            const int expected = static_cast<int>(
                std::ceil(100.0 * static_cast<double>(a) / static_cast<double>(total)));
            CHECK(outcome_score(a, b) == expected);
        }
    }
}

TEST_CASE("outcome_score ceiling overlap property") {
    for (std::uint64_t a = 1; a <= 10; ++a) {
        for (std::uint64_t b = 1; b <= 10; ++b) {
            const int s = outcome_score(a, b) + outcome_score(b, a);
            CHECK((s == 100 || s == 101));
            const bool integral = (100 * a) % (a + b) == 0;
            CHECK((s == 100) == integral);
        }
    }
}

TEST_CASE("spearman_rho basics") {
    std::vector<double> x{1, 2, 3, 4};
    CHECK(spearman_rho(x, x) == doctest::Approx(1.0));
    std::vector<double> rev{4, 3, 2, 1};
    CHECK(spearman_rho(x, rev) == doctest::Approx(-1.0));
    std::vector<double> y{1, 2, 4, 3};
    CHECK(spearman_rho(x, y) == doctest::Approx(0.8));
}

TEST_CASE("spearman_rho equals the 6-sum-d2 shortcut on tie-free data") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + rng.next_below(40);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(i) + rng.uniform(0.0, 0.4);
            y[i] = rng.next_double();
        }
        Rng shuffle_rng(trial);
        shuffle_rng.shuffle(x);
        CHECK(spearman_rho(x, y) ==
              doctest::Approx(testing_oracles::spearman_shortcut(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("spearman_rho invariances") {
    Rng rng(11);
    std::vector<double> x(25), y(25);
    for (auto& v : x) v = rng.uniform(-5.0, 5.0);
    for (auto& v : y) v = rng.uniform(-5.0, 5.0);
    const double rho = spearman_rho(x, y);

    std::vector<double> xt(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xt[i] = std::exp(x[i]);  // strictly increasing
    CHECK(spearman_rho(xt, y) == doctest::Approx(rho).epsilon(1e-12));
    CHECK(spearman_rho(y, x) == doctest::Approx(rho).epsilon(1e-12));

    std::vector<double> yn(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yn[i] = -y[i];
    CHECK(spearman_rho(x, yn) == doctest::Approx(-rho).epsilon(1e-12));
}

TEST_CASE("spearman_rho error paths") {
    std::vector<double> x{1, 2, 3};
    std::vector<double> longer{1, 2, 3, 4};
    CHECK_THROWS_AS(spearman_rho(x, longer), std::invalid_argument);
    std::vector<double> two{1, 2};
    CHECK_THROWS_AS(spearman_rho(two, two), std::invalid_argument);
    std::vector<double> constant{5, 5, 5};
    CHECK_THROWS_AS(spearman_rho(x, constant), std::invalid_argument);
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile_two_sided(0.95) == doctest::Approx(1.9599639845).epsilon(1e-8));
    CHECK(normal_quantile_two_sided(0.99) == doctest::Approx(2.5758293035).epsilon(1e-8));
}

TEST_CASE("spearman_ci is symmetric about zero at rho = 0") {
    const CorrelationReport r = spearman_ci(0.0, 39, 0.95);
    CHECK(r.ci_low == doctest::Approx(-r.ci_high).epsilon(1e-12));
    // Half-width on the arctanh scale is z * sqrt(1/36) = 1.96/6.
    CHECK(std::atanh(r.ci_high) == doctest::Approx(1.9599639845 / 6.0).epsilon(1e-7));
}

TEST_CASE("spearman_ci reproduces the published single-adult stability anchor") {
    const CorrelationReport r = spearman_ci(0.98350, 325, 0.95);
    CHECK(r.ci_low == doctest::Approx(0.97852).epsilon(3e-3));
    CHECK(r.ci_high == doctest::Approx(0.98733).epsilon(3e-3));
    CHECK(std::fabs(r.ci_low - 0.97852) < 0.003);
    CHECK(std::fabs(r.ci_high - 0.98733) < 0.003);
}

TEST_CASE("spearman_ci degenerates to a point at |rho| = 1") {
    const CorrelationReport r = spearman_ci(1.0, 50);
    CHECK(r.ci_low == 1.0);
    CHECK(r.ci_high == 1.0);
}

TEST_CASE("spearman_ci endpoints track a bootstrap for moderate rho") {
    // Bivariate normal with Pearson rho chosen so the rank correlation is
    // about 0.5 (Gaussian copula: rho_p = 2 sin(pi rho_s / 6)).
    const std::size_t n = 100;
    Rng rng(20240517);
    const double rho_p = 2.0 * std::sin(M_PI * 0.5 / 6.0);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = rng.normal();
        const double z2 = rho_p * z1 + std::sqrt(1.0 - rho_p * rho_p) * rng.normal();
        x[i] = z1;
        y[i] = z2;
    }
    const double rho_hat = spearman_rho(x, y);
    const CorrelationReport bw = spearman_ci(rho_hat, n, 0.95);

    const int B = 10000;
    std::vector<double> boot;
    boot.reserve(B);
    std::vector<double> bx(n), by(n);
    for (int b = 0; b < B; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = rng.next_below(n);
            bx[i] = x[k];
            by[i] = y[k];
        }
        boot.push_back(spearman_rho(bx, by));
    }
    std::sort(boot.begin(), boot.end());
    const double lo = boot[static_cast<std::size_t>(0.025 * (B - 1))];
    const double hi = boot[static_cast<std::size_t>(0.975 * (B - 1))];
    CHECK(std::fabs(bw.ci_low - lo) < 0.02);
    CHECK(std::fabs(bw.ci_high - hi) < 0.02);
}

TEST_CASE("tie_break_stability: tie-free scores give identical variants") {
    std::vector<double> scores{9, 3, 7, 1, 5, 4, 8};
    Rng rng(3);
    const TieBreakReport rep = tie_break_stability(scores, 10, rng);
    CHECK(rep.variants == 10);
    CHECK(rep.min_pairwise_rho == doctest::Approx(1.0));
    for (const auto& row : rep.rho_matrix) {
        for (double v : row) CHECK(v == doctest::Approx(1.0));
    }
}

TEST_CASE("tie_break_stability: fully tied vector behaves like random permutations") {
    const std::size_t n = 30;
    std::vector<double> scores(n, 1.0);
    double mean = 0.0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(1000 + s);
        mean += tie_break_stability(scores, 2, rng).rho_matrix[0][1];
    }
    mean /= seeds;
    // Null sd of rho is 1/sqrt(n-1); the mean over 200 draws stays within 3 sigma.
    const double bound = 3.0 / std::sqrt(static_cast<double>(n - 1)) / std::sqrt(double(seeds));
    CHECK(std::fabs(mean) < bound);
}

TEST_CASE("tie_break_stability respects the analytic lower bound") {
    Rng structure_rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 20 + structure_rng.next_below(60);
        std::vector<double> scores(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse quantization produces tie groups of varying sizes
            scores[i] = std::floor(structure_rng.uniform(0.0, 6.0));
        }
        const double bound = tie_break_lower_bound(scores);
        Rng rng(500 + trial);
        const TieBreakReport rep = tie_break_stability(scores, 10, rng);
        CHECK(rep.min_pairwise_rho >= bound - 1e-9);
    }
}

TEST_CASE("roc_auc basics") {
    std::vector<double> perfect{0.9, 0.8, 0.2, 0.1};
    std::vector<bool> labels{true, true, false, false};
    CHECK(roc_auc(perfect, labels).auc == doctest::Approx(1.0));

    std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    std::vector<bool> l{false, false, true, true};
    CHECK(roc_auc(s, l).auc == doctest::Approx(0.75));

    std::vector<bool> single{true, true, true, true};
    CHECK_THROWS_AS(roc_auc(s, single), std::invalid_argument);
}

TEST_CASE("roc_auc equals exhaustive pair enumeration for all small instances") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.next_below(11);
        std::vector<double> scores(n);
        std::vector<bool> labels(n);
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(rng.next_below(5));  // heavy ties
            labels[i] = rng.bernoulli(0.5);
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        const double expected = testing_oracles::brute_force_auc(scores, labels);
        CHECK(roc_auc(scores, labels).auc == expected);  // exact equality
    }
}

TEST_CASE("roc_auc null concentration at n = 1000") {
    Rng rng(123);
    const std::size_t n = 1000;
    std::vector<double> scores(n);
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.next_double();
        labels[i] = rng.bernoulli(0.5);
    }
    const AucReport rep = roc_auc(scores, labels);
    CHECK(std::fabs(rep.auc - 0.5) < 0.05);
    CHECK(rep.ci_low >= 0.0);
    CHECK(rep.ci_high <= 1.0);
}

TEST_CASE("roc_auc negation antisymmetry") {
    Rng rng(5);
    std::vector<double> scores(40);
    std::vector<bool> labels(40);
    for (std::size_t i = 0; i < 40; ++i) {
        scores[i] = rng.uniform(0.0, 1.0);
        labels[i] = i % 3 == 0;
    }
    std::vector<double> neg(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) neg[i] = -scores[i];
    CHECK(roc_auc(scores, labels).auc ==
          doctest::Approx(1.0 - roc_auc(neg, labels).auc).epsilon(1e-14));
}

TEST_CASE("DeLong interval width shrinks roughly as 1/sqrt(n)") {
    auto width_at = [](std::size_t n) {
        Rng rng(42 + n);
        std::vector<double> scores(n);
        std::vector<bool> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = i < n / 2;  // label-balanced
            scores[i] = (labels[i] ? 0.6 : 0.4) + rng.normal() * 0.25;
        }
        const AucReport rep = roc_auc(scores, labels);
        return rep.ci_high - rep.ci_low;
    };
    const double w50 = width_at(50);
    const double w200 = width_at(200);
    const double w800 = width_at(800);
    CHECK(w200 < w50);
    CHECK(w800 < w200);
    CHECK(w50 / w200 > 1.2);
    CHECK(w50 / w200 < 3.4);
    CHECK(w200 / w800 > 1.2);
    CHECK(w200 / w800 < 3.4);
}
