#include "rankaudit/judge.hpp"

namespace rankaudit {

std::shared_ptr<ScriptedJudge> ScriptedJudge::from_responses(std::string judge_id,
                                                             std::vector<std::string> responses,
                                                             bool cycle) {
    if (responses.empty()) {
        throw std::invalid_argument("scripted judge needs at least one response");
    }
    auto state = std::make_shared<std::pair<std::mutex, std::size_t>>();
    auto list = std::make_shared<std::vector<std::string>>(std::move(responses));
    Responder responder = [state, list, cycle](const PromptContext&) {
        std::lock_guard<std::mutex> lock(state->first);
        std::size_t idx = state->second;
        if (idx >= list->size()) {
            idx = cycle ? idx % list->size() : list->size() - 1;
        }
        ++state->second;
        return (*list)[idx];
    };
    return std::make_shared<ScriptedJudge>(std::move(judge_id), std::move(responder));
}

}  // namespace rankaudit
