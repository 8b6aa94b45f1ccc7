#include "rankaudit/graph.hpp"

#include <stdexcept>

namespace rankaudit {

std::vector<PairIndex> sample_pairs(std::size_t n_items, double p, Rng& rng) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("pair sampling p must be in (0, 1]");
    if (n_items < 2) throw std::invalid_argument("pair sampling needs at least 2 items");
    std::vector<PairIndex> pairs;
    for (std::size_t i = 0; i < n_items; ++i) {
        for (std::size_t j = i + 1; j < n_items; ++j) {
            if (rng.bernoulli(p)) pairs.push_back({i, j});
        }
    }
    return pairs;
}

ComparisonGraph::ComparisonGraph(std::vector<std::string> items) : items_(std::move(items)) {
    if (items_.size() < 2) throw std::invalid_argument("comparison graph needs at least 2 items");
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (!index_.emplace(items_[i], i).second) {
            throw std::invalid_argument("duplicate item '" + items_[i] + "' in comparison graph");
        }
    }
    win_counts_.assign(items_.size() * items_.size(), 0);
    comparison_counts_.assign(items_.size() * items_.size(), 0);
}

std::size_t ComparisonGraph::index_of(const std::string& item_id) const {
    const auto it = index_.find(item_id);
    if (it == index_.end()) {
        throw std::invalid_argument("unknown item '" + item_id + "' in comparison graph");
    }
    return it->second;
}

void ComparisonGraph::add_result(const std::string& winner_id, const std::string& loser_id) {
    const std::size_t w = index_of(winner_id);
    const std::size_t l = index_of(loser_id);
    if (w == l) throw std::invalid_argument("comparison between an item and itself");
    win_counts_[l * size() + w] += 1;
    comparison_counts_[l * size() + w] += 1;
    comparison_counts_[w * size() + l] += 1;
}

void ComparisonGraph::add_verdict(const JudgeVerdict& verdict) {
    const std::string& loser =
        verdict.winner_id == verdict.left_id ? verdict.right_id : verdict.left_id;
    add_result(verdict.winner_id, loser);
}

ComparisonGraph build_graph(const std::vector<std::string>& items,
                            const std::vector<JudgeVerdict>& verdicts) {
    ComparisonGraph graph(items);
    for (const auto& v : verdicts) graph.add_verdict(v);
    return graph;
}

}  // namespace rankaudit
