#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rankaudit/judge.hpp"
#include "rankaudit/rng.hpp"

namespace rankaudit {

// Bradley-Terry-Luce oracle: item i beats j with probability
// strength(i) / (strength(i) + strength(j)).
struct BtlOracle {
    std::map<std::string, double> strengths;
    std::uint64_t seed = 0;

    void validate() const;
    double strength_of(const std::string& item_id) const;
};

double btl_win_probability(const BtlOracle& oracle, const std::string& i, const std::string& j);

// One Bernoulli draw; returns the winner token. Deterministic in rng state.
std::string btl_compare(const BtlOracle& oracle, const std::string& i, const std::string& j,
                        Rng& rng);

// Judge adapter over a BtlOracle. Win probabilities can be clamped into
// [clamp_lo, clamp_hi] to emulate a noisy judge with a weak preference signal.
class BtlJudge : public Judge {
public:
    BtlJudge(std::string judge_id, BtlOracle oracle, double clamp_lo = 0.0, double clamp_hi = 1.0);

    std::string id() const override { return id_; }
    std::string respond(const PromptContext& ctx) override;

    const BtlOracle& oracle() const { return oracle_; }

private:
    std::string id_;
    BtlOracle oracle_;
    double clamp_lo_;
    double clamp_hi_;
};

}  // namespace rankaudit
