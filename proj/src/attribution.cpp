#include "rankaudit/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rankaudit/kernels.hpp"

namespace rankaudit {

namespace {

double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace

std::vector<std::size_t> FeatureMatrix::active_features(std::size_t item) const {
    std::vector<std::size_t> active;
    active.reserve(blocks.size());
    for (const auto& [begin, end] : blocks) {
        for (std::size_t f = begin; f < end; ++f) {
            if (at(item, f)) {
                active.push_back(f);
                break;
            }
        }
    }
    return active;
}

FeatureMatrix encode_features(const CohortDataset& dataset) {
    validate_dataset(dataset);
    FeatureMatrix X;
    X.n_items = dataset.items.size();
    for (const auto& item : dataset.items) X.item_ids.push_back(item.item_id);

    // Vocabulary per question, in schema order; answers sorted lexicographically.
    std::vector<std::vector<std::string>> vocab(dataset.schema.size());
    for (std::size_t q = 0; q < dataset.schema.size(); ++q) {
        std::set<std::string> answers;
        for (const auto& item : dataset.items) answers.insert(item.answers[q].answer);
        vocab[q].assign(answers.begin(), answers.end());
    }

    std::vector<std::map<std::string, std::size_t>> column(dataset.schema.size());
    for (std::size_t q = 0; q < dataset.schema.size(); ++q) {
        const std::size_t begin = X.feature_names.size();
        for (const auto& answer : vocab[q]) {
            column[q][answer] = X.feature_names.size();
            X.feature_names.push_back(dataset.schema[q] + " = " + answer);
        }
        X.blocks.emplace_back(begin, X.feature_names.size());
    }
    X.n_features = X.feature_names.size();
    X.cells.assign(X.n_items * X.n_features, 0);
    for (std::size_t i = 0; i < X.n_items; ++i) {
        for (std::size_t q = 0; q < dataset.schema.size(); ++q) {
            const std::size_t f = column[q].at(dataset.items[i].answers[q].answer);
            X.cells[i * X.n_features + f] = 1;
        }
    }
    return X;
}

std::vector<int> levels_from_ranking(const FeatureMatrix& X,
                                     const std::vector<std::string>& order_best_first,
                                     int quantile_bins) {
    if (order_best_first.size() != X.n_items) {
        throw std::invalid_argument("ranking does not cover the feature matrix items");
    }
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < X.item_ids.size(); ++i) row_of[X.item_ids[i]] = i;

    std::vector<int> levels(X.n_items, -1);
    const int n = static_cast<int>(X.n_items);
    for (std::size_t pos = 0; pos < order_best_first.size(); ++pos) {
        const auto it = row_of.find(order_best_first[pos]);
        if (it == row_of.end()) {
            throw std::invalid_argument("ranking names unknown item '" + order_best_first[pos] + "'");
        }
        if (levels[it->second] != -1) {
            throw std::invalid_argument("ranking repeats item '" + order_best_first[pos] + "'");
        }
        // best-ranked item gets the highest level
        levels[it->second] = n - 1 - static_cast<int>(pos);
    }
    if (quantile_bins > 1 && quantile_bins < n) {
        for (auto& l : levels) {
            l = std::min(quantile_bins - 1, (l * quantile_bins) / n);
        }
    }
    return levels;
}

namespace {

double all_thresholds_loss_impl(const std::vector<std::vector<std::size_t>>& actives,
                                const std::vector<int>& levels, std::size_t n_features,
                                std::size_t n_levels, double l2, std::span<const double> params,
                                std::span<double> grad) {
    const std::size_t F = n_features;
    const std::size_t K = n_levels;
    if (K < 2) throw std::invalid_argument("need at least 2 ordinal levels");
    if (params.size() != F + K - 1 || grad.size() != params.size()) {
        throw std::invalid_argument("parameter vector has the wrong length");
    }
    if (levels.size() != actives.size()) throw std::invalid_argument("levels/items mismatch");

    std::fill(grad.begin(), grad.end(), 0.0);
    const double* w = params.data();
    const double* b = params.data() + F;
    double* gw = grad.data();
    double* gb = grad.data() + F;

    double loss = 0.0;
    for (std::size_t i = 0; i < actives.size(); ++i) {
        const int r = levels[i];
        if (r < 0 || static_cast<std::size_t>(r) >= K) {
            throw std::invalid_argument("ordinal level out of range");
        }
        double s = 0.0;
        for (std::size_t f : actives[i]) s += w[f];

        double gs = 0.0;
        for (std::size_t j = 0; j < K - 1; ++j) {
            if (static_cast<int>(j) < r) {
                const double t = b[j] - s;  // wants s above the boundary
                loss += softplus(t);
                const double sig = sigmoid(t);
                gs -= sig;
                gb[j] += sig;
            } else {
                const double t = s - b[j];  // wants s below the boundary
                loss += softplus(t);
                const double sig = sigmoid(t);
                gs += sig;
                gb[j] -= sig;
            }
        }
        for (std::size_t f : actives[i]) gw[f] += gs;
    }

    if (l2 > 0.0) {
        loss += 0.5 * l2 * kernels::dot(w, w, F);
        for (std::size_t f = 0; f < F; ++f) gw[f] += l2 * w[f];
    }
    return loss;
}

std::vector<std::vector<std::size_t>> collect_actives(const FeatureMatrix& X) {
    std::vector<std::vector<std::size_t>> actives;
    actives.reserve(X.n_items);
    for (std::size_t i = 0; i < X.n_items; ++i) actives.push_back(X.active_features(i));
    return actives;
}

}  // namespace

double all_thresholds_loss(const FeatureMatrix& X, const std::vector<int>& levels,
                           std::size_t n_levels, double l2, std::span<const double> params,
                           std::span<double> grad) {
    return all_thresholds_loss_impl(collect_actives(X), levels, X.n_features, n_levels, l2,
                                    params, grad);
}

namespace {

std::vector<double> normalize_coefficients(const std::vector<double>& coefficients,
                                           CoefficientScaling scaling) {
    std::vector<double> out = coefficients;
    double denom = 0.0;
    if (scaling == CoefficientScaling::max_abs) {
        denom = kernels::max_abs(out.data(), out.size());
    } else {
        denom = std::sqrt(kernels::dot(out.data(), out.data(), out.size()));
    }
    if (denom > 0.0) kernels::scale(out.data(), 1.0 / denom, out.size());
    return out;
}

}  // namespace

AttributionModel fit_ordinal(const FeatureMatrix& X, const std::vector<int>& levels, double l2,
                             const FitOptions& options) {
    if (!(l2 >= 0.0)) throw std::invalid_argument("l2 coefficient must be >= 0");
    int max_level = 0;
    for (int l : levels) max_level = std::max(max_level, l);
    const std::size_t n_levels = static_cast<std::size_t>(max_level) + 1;
    if (n_levels < 2) throw std::invalid_argument("ranking induces fewer than 2 ordinal levels");

    const std::size_t dim = X.n_features + n_levels - 1;
    const std::vector<std::vector<std::size_t>> actives = collect_actives(X);
    Objective objective = [&](std::span<const double> p, std::span<double> g) {
        return all_thresholds_loss_impl(actives, levels, X.n_features, n_levels, l2, p, g);
    };
    LbfgsOptions lopt;
    lopt.max_iterations = options.max_iterations;
    lopt.grad_tol = options.grad_tol;
    const LbfgsResult res = lbfgs_minimize(objective, std::vector<double>(dim, 0.0), lopt);

    AttributionModel model;
    model.feature_names = X.feature_names;
    model.coefficients.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(X.n_features));
    model.thresholds.assign(res.x.begin() + static_cast<std::ptrdiff_t>(X.n_features), res.x.end());
    // The optimum of the all-thresholds loss has ordered thresholds; smooth
    // out sub-tolerance numerical inversions so the stored vector is
    // nondecreasing exactly.
    for (std::size_t j = 1; j < model.thresholds.size(); ++j) {
        if (model.thresholds[j] < model.thresholds[j - 1] &&
            model.thresholds[j - 1] - model.thresholds[j] < 1e-8) {
            model.thresholds[j] = model.thresholds[j - 1];
        }
    }
    model.l2_coefficient = l2;
    model.scaling = options.scaling;
    model.normalized_coefficients = normalize_coefficients(model.coefficients, options.scaling);
    model.converged = res.converged;
    model.iterations = res.iterations;
    model.grad_inf_norm = res.grad_inf_norm;
    return model;
}

AttributionModel fit_ordinal_to_ranking(const FeatureMatrix& X,
                                        const std::vector<std::string>& order_best_first,
                                        double l2, const FitOptions& options) {
    return fit_ordinal(X, levels_from_ranking(X, order_best_first, options.quantile_bins), l2,
                       options);
}

std::vector<std::pair<std::string, double>> top_features(const AttributionModel& model,
                                                         std::size_t k) {
    if (k < 1) throw std::invalid_argument("top_features: k must be >= 1");
    std::vector<std::size_t> order(model.normalized_coefficients.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::fabs(model.normalized_coefficients[a]);
        const double mb = std::fabs(model.normalized_coefficients[b]);
        if (ma != mb) return ma > mb;
        return model.feature_names[a] < model.feature_names[b];
    });
    std::vector<std::pair<std::string, double>> out;
    const std::size_t take = std::min(k, order.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        out.emplace_back(model.feature_names[order[i]], model.normalized_coefficients[order[i]]);
    }
    return out;
}

OverlapReport compare_attributions(const AttributionModel& a, const AttributionModel& b,
                                   std::size_t k) {
    if (a.feature_names != b.feature_names) {
        throw std::invalid_argument("attribution models have different feature spaces");
    }
    const auto top_a = top_features(a, k);
    const auto top_b = top_features(b, k);

    OverlapReport rep;
    rep.k = k;
    std::map<std::string, double> in_b;
    for (const auto& [name, coeff] : top_b) in_b[name] = coeff;
    for (const auto& [name, coeff_a] : top_a) {
        const auto it = in_b.find(name);
        if (it == in_b.end()) continue;
        OverlapReport::SharedFeature sf;
        sf.feature = name;
        sf.coefficient_a = coeff_a;
        sf.coefficient_b = it->second;
        sf.sign_agreement = (coeff_a >= 0.0) == (it->second >= 0.0);
        if (sf.sign_agreement) ++rep.polarity_agreements; else ++rep.polarity_disagreements;
        rep.shared.push_back(std::move(sf));
        ++rep.overlap;
    }
    return rep;
}

std::string attribution_to_csv(const AttributionModel& model) {
    std::ostringstream out;
    out << "feature,coefficient,normalized_coefficient\n";
    const auto ranked = top_features(model, model.feature_names.size());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < model.feature_names.size(); ++i) index[model.feature_names[i]] = i;
    for (const auto& [name, normalized] : ranked) {
        const std::size_t i = index.at(name);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f", model.coefficients[i], normalized);
        out << '"' << name << "\"," << buf << '\n';
    }
    return out.str();
}

}  // namespace rankaudit
