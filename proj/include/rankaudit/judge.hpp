#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankaudit/condition.hpp"
#include "rankaudit/rng.hpp"

namespace rankaudit {

struct Message {
    std::string role;
    std::string content;
};

// Everything a judge may look at for one reply. Text judges read `messages`;
// synthetic judges read the pair ids and the per-call seed so replies are
// reproducible no matter how calls are scheduled.
struct PromptContext {
    std::vector<Message> messages;
    std::string left_id;   // presented as Household A
    std::string right_id;  // presented as Household B
    InfoCondition condition = InfoCondition::no_prediction;
    int run_index = 0;
    int attempt = 0;
    std::uint64_t seed = 0;
};

// Transport or endpoint failure; `attempts` is filled in by the gateway.
class EndpointError : public std::runtime_error {
public:
    explicit EndpointError(const std::string& what, int attempts_made = 0)
        : std::runtime_error(what), attempts(attempts_made) {}
    int attempts;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual std::string id() const = 0;
    // One raw reply for the given context. Throws EndpointError on transport
    // failure; never interprets the reply.
    virtual std::string respond(const PromptContext& ctx) = 0;
};

// Replays canned responses or an arbitrary response policy.
class ScriptedJudge : public Judge {
public:
    using Responder = std::function<std::string(const PromptContext&)>;

    ScriptedJudge(std::string judge_id, Responder responder)
        : id_(std::move(judge_id)), responder_(std::move(responder)) {}

    // Canned response list; cycles when exhausted if `cycle`, otherwise the
    // last response repeats.
    static std::shared_ptr<ScriptedJudge> from_responses(std::string judge_id,
                                                         std::vector<std::string> responses,
                                                         bool cycle = true);

    std::string id() const override { return id_; }
    std::string respond(const PromptContext& ctx) override { return responder_(ctx); }

private:
    std::string id_;
    Responder responder_;
};

// Answers "Household A"/"Household B" by a fair coin, deterministic in the
// per-call seed.
class CoinJudge : public Judge {
public:
    CoinJudge(std::string judge_id, std::uint64_t seed) : id_(std::move(judge_id)), seed_(seed) {}
    std::string id() const override { return id_; }
    std::string respond(const PromptContext& ctx) override {
        Rng rng(derive_seed(seed_, "coin", ctx.seed, static_cast<std::uint64_t>(ctx.attempt)));
        return rng.bernoulli(0.5) ? "Household A" : "Household B";
    }

private:
    std::string id_;
    std::uint64_t seed_;
};

}  // namespace rankaudit
