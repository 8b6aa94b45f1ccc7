#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rankaudit/gateway.hpp"
#include "rankaudit/rng.hpp"

namespace rankaudit {

struct PairIndex {
    std::size_t a = 0;
    std::size_t b = 0;  // a < b
    bool operator==(const PairIndex&) const = default;
};

// Includes each of the N(N-1)/2 unordered pairs independently with
// probability p. Deterministic in the rng state.
std::vector<PairIndex> sample_pairs(std::size_t n_items, double p, Rng& rng);

// Per-ordered-pair win counts over an item set.
class ComparisonGraph {
public:
    explicit ComparisonGraph(std::vector<std::string> items);

    std::size_t size() const { return items_.size(); }
    const std::vector<std::string>& items() const { return items_; }
    std::size_t index_of(const std::string& item_id) const;  // throws on unknown id

    // Count of comparisons between i and j in which j won.
    std::uint64_t wins(std::size_t i, std::size_t j) const { return win_counts_[i * size() + j]; }
    // Total comparisons recorded for the unordered pair {i, j}.
    std::uint64_t comparisons(std::size_t i, std::size_t j) const {
        return comparison_counts_[i * size() + j];
    }

    void add_result(const std::string& winner_id, const std::string& loser_id);
    void add_verdict(const JudgeVerdict& verdict);

private:
    std::vector<std::string> items_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::uint64_t> win_counts_;        // [loser][winner] increments
    std::vector<std::uint64_t> comparison_counts_; // symmetric
};

ComparisonGraph build_graph(const std::vector<std::string>& items,
                            const std::vector<JudgeVerdict>& verdicts);

}  // namespace rankaudit
