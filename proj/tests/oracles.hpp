#pragma once

// Test-only oracles, independent of the library's production paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rankaudit/transition.hpp"

namespace testing_oracles {

// Dense stationary solve: (I - P^T) x = 0 with sum(x) = 1, by Gaussian
// elimination with partial pivoting. Independent of power iteration.
inline std::vector<double> dense_stationary_solve(const rankaudit::TransitionMatrix& m) {
    const std::size_t n = m.n;
    std::vector<double> a(n * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            a[r * n + c] = (r == c ? 1.0 : 0.0) - m.at(c, r);
        }
    }
    for (std::size_t c = 0; c < n; ++c) a[(n - 1) * n + c] = 1.0;  // sum constraint
    rhs[n - 1] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
        }
        if (std::fabs(a[pivot * n + col]) < 1e-14) throw std::runtime_error("singular system");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
            std::swap(rhs[pivot], rhs[col]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = 0; r < n; ++r) x[r] = rhs[r] / a[r * n + r];
    return x;
}

// Spearman shortcut 1 - 6 sum d^2 / (n(n^2-1)); valid only without ties.
inline double spearman_shortcut(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    auto ranks = [&](std::span<const double> v) {
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            double less = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (v[j] < v[i]) ++less;
                if (v[j] == v[i] && j != i) throw std::runtime_error("shortcut oracle needs no ties");
            }
            r[i] = less + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    double sum_d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum_d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
}

// Exhaustive Mann-Whitney over all positive-negative pairs, integer counts.
inline double brute_force_auc(std::span<const double> scores, const std::vector<bool>& labels) {
    std::uint64_t wins = 0, ties = 0, pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) ++wins;
            else if (scores[i] == scores[j]) ++ties;
        }
    }
    if (pairs == 0) throw std::runtime_error("no positive-negative pairs");
    return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
           static_cast<double>(pairs);
}

// Central finite differences of a scalar function of a vector.
inline std::vector<double> central_difference_gradient(
    const std::function<double(std::span<const double>)>& f, std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace testing_oracles
