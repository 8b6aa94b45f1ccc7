#include "rankaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rankaudit/kernels.hpp"

namespace rankaudit {

int outcome_score(std::uint64_t n_outcome, std::uint64_t n_vulnerability) {
    const std::uint64_t total = n_outcome + n_vulnerability;
    if (total == 0) throw std::invalid_argument("outcome_score: zero oriented decisions");
    return static_cast<int>((100 * n_outcome + total - 1) / total);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the mean of ranks i+1..j+1
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw std::invalid_argument("spearman_rho: need at least 3 samples");

    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    const double mean = 0.5 * static_cast<double>(n + 1);  // mean rank is (n+1)/2 either way
    for (auto& v : rx) v -= mean;
    for (auto& v : ry) v -= mean;

    const double sxx = kernels::dot(rx.data(), rx.data(), n);
    const double syy = kernels::dot(ry.data(), ry.data(), n);
    if (sxx <= 0.0 || syy <= 0.0) {
        throw std::invalid_argument("spearman_rho: zero rank variance");
    }
    const double sxy = kernels::dot(rx.data(), ry.data(), n);
    return sxy / std::sqrt(sxx * syy);
}

namespace {

// Acklam's rational approximation for the standard normal quantile, refined
// with one Halley step through erfc.
double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p out of (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double z;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-z / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * z * z);
    return z - u / (1.0 + 0.5 * z * u);
}

}  // namespace

double normal_quantile_two_sided(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0,1)");
    }
    return inverse_normal_cdf(0.5 * (1.0 + level));
}

CorrelationReport spearman_ci(double rho, std::size_t n, double level) {
    CorrelationReport rep;
    rep.rho = rho;
    rep.n = n;
    rep.level = level;
    if (std::fabs(rho) >= 1.0) {
        rep.ci_low = rep.ci_high = rho;  // degenerate: the transform blows up
        return rep;
    }
    if (n < 4) throw std::invalid_argument("spearman_ci: need n >= 4");
    const double z = std::atanh(rho);
    const double se = std::sqrt((1.0 + 0.5 * rho * rho) / static_cast<double>(n - 3));
    const double zcrit = normal_quantile_two_sided(level);
    rep.ci_low = std::tanh(z - zcrit * se);
    rep.ci_high = std::tanh(z + zcrit * se);
    return rep;
}

CorrelationReport spearman_report(std::span<const double> x, std::span<const double> y,
                                  double level) {
    return spearman_ci(spearman_rho(x, y), x.size(), level);
}

namespace {

// Strict rank vector (1 = top score) with tie groups permuted at random.
std::vector<double> tie_broken_ranks(std::span<const double> scores, Rng& rng) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        if (j > i) {
            std::vector<std::size_t> group(order.begin() + static_cast<std::ptrdiff_t>(i),
                                           order.begin() + static_cast<std::ptrdiff_t>(j + 1));
            rng.shuffle(group);
            std::copy(group.begin(), group.end(), order.begin() + static_cast<std::ptrdiff_t>(i));
        }
        i = j + 1;
    }
    std::vector<double> ranks(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        ranks[order[pos]] = static_cast<double>(pos + 1);
    }
    return ranks;
}

}  // namespace

TieBreakReport tie_break_stability(std::span<const double> scores, std::size_t k, Rng& rng) {
    if (k < 2) throw std::invalid_argument("tie_break_stability: need at least 2 variants");
    if (scores.size() < 3) throw std::invalid_argument("tie_break_stability: need at least 3 scores");

    std::vector<std::vector<double>> variants;
    variants.reserve(k);
    for (std::size_t v = 0; v < k; ++v) variants.push_back(tie_broken_ranks(scores, rng));

    TieBreakReport rep;
    rep.variants = k;
    rep.rho_matrix.assign(k, std::vector<double>(k, 1.0));
    rep.min_pairwise_rho = 1.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double rho = spearman_rho(variants[a], variants[b]);
            rep.rho_matrix[a][b] = rep.rho_matrix[b][a] = rho;
            rep.min_pairwise_rho = std::min(rep.min_pairwise_rho, rho);
        }
    }
    return rep;
}

double tie_break_lower_bound(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 2) return 1.0;
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    double sum_g = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        const double g = static_cast<double>(j - i + 1);
        sum_g += g * (g * g - 1.0);
        i = j + 1;
    }
    const double nn = static_cast<double>(n);
    return 1.0 - 2.0 * sum_g / (nn * (nn * nn - 1.0));
}

AucReport roc_auc(std::span<const double> scores, const std::vector<bool>& labels, double level) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: length mismatch");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (bool l : labels) n_pos += l ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("roc_auc: need at least one positive and one negative label");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Integer pair counting over tied-score groups: exact AUC.
    std::uint64_t wins = 0, tied = 0;
    std::uint64_t neg_below = 0, pos_below = 0;
    std::vector<double> v10;  // placement of each positive among negatives
    std::vector<double> v01;  // placement of each negative among positives
    v10.reserve(n_pos);
    v01.reserve(n_neg);

    struct Group {
        std::uint64_t pos = 0, neg = 0, neg_below = 0, pos_below = 0;
    };
    std::vector<Group> groups;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        Group g;
        g.neg_below = neg_below;
        g.pos_below = pos_below;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]]) ++g.pos; else ++g.neg;
            ++j;
        }
        wins += g.pos * g.neg_below;
        tied += g.pos * g.neg;
        neg_below += g.neg;
        pos_below += g.pos;
        groups.push_back(g);
        i = j;
    }

    AucReport rep;
    rep.n_positive = n_pos;
    rep.n_negative = n_neg;
    const double pn = static_cast<double>(n_pos) * static_cast<double>(n_neg);
    rep.auc = (static_cast<double>(wins) + 0.5 * static_cast<double>(tied)) / pn;

    // DeLong structural components.
    for (const auto& g : groups) {
        const std::uint64_t pos_above = n_pos - g.pos_below - g.pos;
        const double v10_g = (static_cast<double>(g.neg_below) + 0.5 * static_cast<double>(g.neg)) /
                             static_cast<double>(n_neg);
        const double v01_g = (static_cast<double>(pos_above) + 0.5 * static_cast<double>(g.pos)) /
                             static_cast<double>(n_pos);
        for (std::uint64_t t = 0; t < g.pos; ++t) v10.push_back(v10_g);
        for (std::uint64_t t = 0; t < g.neg; ++t) v01.push_back(v01_g);
    }
    auto sample_var = [](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double mean = kernels::sum(v.data(), v.size()) / static_cast<double>(v.size());
        double acc = 0.0;
        for (double x : v) acc += (x - mean) * (x - mean);
        return acc / static_cast<double>(v.size() - 1);
    };
    const double var = sample_var(v10) / static_cast<double>(n_pos) +
                       sample_var(v01) / static_cast<double>(n_neg);
    const double zcrit = normal_quantile_two_sided(level);
    const double half = zcrit * std::sqrt(std::max(var, 0.0));
    rep.ci_low = std::max(0.0, rep.auc - half);
    rep.ci_high = std::min(1.0, rep.auc + half);
    return rep;
}

}  // namespace rankaudit
