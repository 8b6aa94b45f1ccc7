#include "rankaudit/transition.hpp"

#include <algorithm>
#include <stdexcept>

#include "rankaudit/kernels.hpp"

namespace rankaudit {

double TransitionMatrix::row_sum(std::size_t i) const {
    return kernels::sum(row(i), n);
}

TransitionMatrix transition_from_win_fractions(const std::vector<double>& fractions,
                                               const std::vector<char>& sampled, std::size_t n,
                                               double epsilon) {
    if (fractions.size() != n * n || sampled.size() != n * n) {
        throw std::invalid_argument("win fraction matrix has the wrong shape");
    }
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");

    TransitionMatrix m;
    m.n = n;
    m.epsilon = epsilon;
    m.p.assign(n * n, 0.0);

    // Smoothed outgoing mass per row, then one uniform normalizer (the
    // maximum outgoing mass) for the whole matrix. Each row keeps its
    // leftover mass on the diagonal, so rows sum to one and an item with no
    // losses (or no comparisons at all) becomes a self-loop at epsilon = 0.
    // A per-row normalizer would tilt the stationary vector by each item's
    // comparison degree; the uniform normalizer keeps the chain's stationary
    // distribution exactly proportional to the strengths under exact
    // Bradley-Terry-Luce win fractions, whatever the sampled graph.
    std::vector<double> row_mass(n, 0.0);
    double normalizer = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double* row = m.p.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double w = epsilon;
            if (sampled[i * n + j]) w += fractions[i * n + j];  // share j took from i
            row[j] = w;
            row_mass[i] += w;
        }
        normalizer = std::max(normalizer, row_mass[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double* row = m.p.data() + i * n;
        if (normalizer <= 0.0) {
            std::fill(row, row + n, 0.0);
            row[i] = 1.0;
            continue;
        }
        kernels::scale(row, 1.0 / normalizer, n);
        row[i] = 1.0 - row_mass[i] / normalizer;
    }
    return m;
}

TransitionMatrix to_transition_matrix(const ComparisonGraph& graph, double epsilon) {
    const std::size_t n = graph.size();
    std::vector<double> fractions(n * n, 0.0);
    std::vector<char> sampled(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const std::uint64_t c = graph.comparisons(i, j);
            if (c == 0) continue;
            sampled[i * n + j] = 1;
            fractions[i * n + j] =
                static_cast<double>(graph.wins(i, j)) / static_cast<double>(c);
        }
    }
    return transition_from_win_fractions(fractions, sampled, n, epsilon);
}

StationaryResult stationary_distribution(const TransitionMatrix& matrix, double tol,
                                         int max_iterations) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    const std::size_t n = matrix.n;
    if (n == 0) throw std::invalid_argument("empty transition matrix");

    StationaryResult res;
    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n, 0.0);
    for (int it = 1; it <= max_iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            kernels::axpy(next.data(), pi[i], matrix.row(i), n);
        }
        const double total = kernels::sum(next.data(), n);
        kernels::scale(next.data(), 1.0 / total, n);
        const double delta = kernels::l1_diff(pi.data(), next.data(), n);
        pi.swap(next);
        if (delta < tol) {
            res.converged = true;
            res.iterations = it;
            break;
        }
        res.iterations = it;
    }
    res.scores = std::move(pi);
    return res;
}

}  // namespace rankaudit
