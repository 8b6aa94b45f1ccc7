#include "rankaudit/btl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rankaudit {

void BtlOracle::validate() const {
    if (strengths.empty()) throw std::invalid_argument("BTL oracle has no strengths");
    for (const auto& [id, theta] : strengths) {
        if (!(theta > 0.0) || !std::isfinite(theta)) {
            throw std::invalid_argument("BTL strength for '" + id + "' must be positive and finite");
        }
    }
}

double BtlOracle::strength_of(const std::string& item_id) const {
    const auto it = strengths.find(item_id);
    if (it == strengths.end()) {
        throw std::invalid_argument("BTL oracle has no strength for item '" + item_id + "'");
    }
    return it->second;
}

double btl_win_probability(const BtlOracle& oracle, const std::string& i, const std::string& j) {
    const double ti = oracle.strength_of(i);
    const double tj = oracle.strength_of(j);
    if (!(ti > 0.0) || !(tj > 0.0)) throw std::invalid_argument("BTL strengths must be positive");
    return ti / (ti + tj);
}

std::string btl_compare(const BtlOracle& oracle, const std::string& i, const std::string& j,
                        Rng& rng) {
    return rng.bernoulli(btl_win_probability(oracle, i, j)) ? i : j;
}

BtlJudge::BtlJudge(std::string judge_id, BtlOracle oracle, double clamp_lo, double clamp_hi)
    : id_(std::move(judge_id)), oracle_(std::move(oracle)), clamp_lo_(clamp_lo), clamp_hi_(clamp_hi) {
    oracle_.validate();
    if (!(clamp_lo_ >= 0.0 && clamp_lo_ <= clamp_hi_ && clamp_hi_ <= 1.0)) {
        throw std::invalid_argument("BTL clamp bounds must satisfy 0 <= lo <= hi <= 1");
    }
}

std::string BtlJudge::respond(const PromptContext& ctx) {
    double p_left = btl_win_probability(oracle_, ctx.left_id, ctx.right_id);
    p_left = std::clamp(p_left, clamp_lo_, clamp_hi_);
    Rng rng(derive_seed(oracle_.seed, "btl-judge", ctx.seed,
                        static_cast<std::uint64_t>(ctx.attempt)));
    return rng.bernoulli(p_left) ? "Household A" : "Household B";
}

}  // namespace rankaudit
