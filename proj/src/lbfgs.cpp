#include "rankaudit/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "rankaudit/kernels.hpp"

namespace rankaudit {

namespace {

struct Correction {
    std::vector<double> s;
    std::vector<double> y;
    double rho = 0.0;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> init,
                           const LbfgsOptions& options) {
    const std::size_t n = init.size();
    LbfgsResult res;
    res.x = std::move(init);

    std::vector<double> grad(n, 0.0);
    double f = objective(res.x, grad);

    std::deque<Correction> history;
    std::vector<double> direction(n), x_new(n), grad_new(n), alpha_buf;

    auto converged = [&](double fval, const std::vector<double>& g) {
        return kernels::max_abs(g.data(), n) <= options.grad_tol * std::max(1.0, std::fabs(fval));
    };

    int it = 0;
    for (; it < options.max_iterations; ++it) {
        if (converged(f, grad)) {
            res.converged = true;
            break;
        }

        // Two-loop recursion.
        direction = grad;
        alpha_buf.assign(history.size(), 0.0);
        for (std::size_t idx = history.size(); idx-- > 0;) {
            const Correction& c = history[idx];
            const double alpha = c.rho * kernels::dot(c.s.data(), direction.data(), n);
            alpha_buf[idx] = alpha;
            kernels::axpy(direction.data(), -alpha, c.y.data(), n);
        }
        if (!history.empty()) {
            const Correction& last = history.back();
            const double yy = kernels::dot(last.y.data(), last.y.data(), n);
            if (yy > 0.0) {
                const double gamma = 1.0 / (last.rho * yy);
                kernels::scale(direction.data(), gamma, n);
            }
        }
        for (std::size_t idx = 0; idx < history.size(); ++idx) {
            const Correction& c = history[idx];
            const double beta = c.rho * kernels::dot(c.y.data(), direction.data(), n);
            kernels::axpy(direction.data(), alpha_buf[idx] - beta, c.s.data(), n);
        }
        kernels::scale(direction.data(), -1.0, n);

        double dir_dot_grad = kernels::dot(direction.data(), grad.data(), n);
        if (!(dir_dot_grad < 0.0)) {
            // Not a descent direction; fall back to steepest descent.
            direction = grad;
            kernels::scale(direction.data(), -1.0, n);
            dir_dot_grad = -kernels::dot(grad.data(), grad.data(), n);
            history.clear();
        }

        // Armijo backtracking.
        double step = history.empty()
                          ? 1.0 / std::max(1.0, kernels::max_abs(grad.data(), n))
                          : 1.0;
        const double c1 = 1e-4;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < options.max_line_search; ++ls) {
            x_new = res.x;
            kernels::axpy(x_new.data(), step, direction.data(), n);
            f_new = objective(x_new, grad_new);
            if (std::isfinite(f_new) && f_new <= f + c1 * step * dir_dot_grad) {
                accepted = true;
                break;
            }
            // Near the optimum the Armijo decrease can drop below rounding;
            // any strict decrease is still progress.
            if (std::isfinite(f_new) && f_new < f && ls > 3) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stuck: return the best point found

        Correction c;
        c.s.assign(n, 0.0);
        c.y.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            c.s[i] = x_new[i] - res.x[i];
            c.y[i] = grad_new[i] - grad[i];
        }
        const double sy = kernels::dot(c.s.data(), c.y.data(), n);
        if (sy > 1e-12) {
            c.rho = 1.0 / sy;
            history.push_back(std::move(c));
            if (history.size() > static_cast<std::size_t>(options.history)) history.pop_front();
        }

        res.x.swap(x_new);
        grad.swap(grad_new);
        f = f_new;
    }

    res.f = f;
    res.grad_inf_norm = kernels::max_abs(grad.data(), n);
    res.iterations = it;
    if (!res.converged) res.converged = converged(f, grad);
    return res;
}

}  // namespace rankaudit
