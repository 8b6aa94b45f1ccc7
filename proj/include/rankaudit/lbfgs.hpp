#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rankaudit {

// Objective: fills grad (same length as x) and returns the loss.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    int max_iterations = 2000;
    double grad_tol = 1e-6;  // converged when ||g||_inf <= grad_tol * max(1, |f|)
    int history = 10;
    int max_line_search = 60;
};

struct LbfgsResult {
    std::vector<double> x;
    double f = 0.0;
    double grad_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Deterministic limited-memory BFGS with Armijo backtracking. Suitable for
// smooth convex objectives; used by the ordinal attribution fit.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> init,
                           const LbfgsOptions& options = {});

}  // namespace rankaudit
