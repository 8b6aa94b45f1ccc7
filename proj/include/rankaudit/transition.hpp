#pragma once

#include <vector>

#include "rankaudit/graph.hpp"

namespace rankaudit {

// Row-stochastic transition matrix of the comparison random walk.
struct TransitionMatrix {
    std::size_t n = 0;
    double epsilon = 0.0;
    std::vector<double> p;  // row-major, n*n

    double at(std::size_t i, std::size_t j) const { return p[i * n + j]; }
    const double* row(std::size_t i) const { return p.data() + i * n; }
    double row_sum(std::size_t i) const;
};

// Core construction from win fractions. fractions[i*n+j] is the share of the
// comparisons between i and j that j won; sampled[i*n+j] marks pairs with at
// least one comparison. Epsilon is added to every off-diagonal entry, rows
// are scaled by one uniform normalizer (the maximum outgoing mass) and each
// row retains its remainder on the diagonal, so every row sums to one. A row
// with no outgoing mass (only possible when epsilon = 0) is a self-loop.
TransitionMatrix transition_from_win_fractions(const std::vector<double>& fractions,
                                               const std::vector<char>& sampled, std::size_t n,
                                               double epsilon);

TransitionMatrix to_transition_matrix(const ComparisonGraph& graph, double epsilon);

struct StationaryResult {
    std::vector<double> scores;  // sums to 1
    bool converged = false;
    int iterations = 0;
};

// Power iteration from the uniform vector; converged when successive
// iterates differ by less than tol in L1. Non-convergence returns the last
// iterate with converged = false.
StationaryResult stationary_distribution(const TransitionMatrix& matrix, double tol,
                                         int max_iterations);

}  // namespace rankaudit
