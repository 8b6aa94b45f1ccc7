#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rankaudit {

// Information condition for one comparison: what the judge gets to see.
enum class InfoCondition {
    no_prediction,      // questionnaire answers only
    only_prediction,    // risk labels only
    prediction_first,   // answers only; the judge states its own risk estimate first
    shared_prediction,  // answers plus precomputed risk labels
};

constexpr std::array<InfoCondition, 4> kAllConditions = {
    InfoCondition::no_prediction,
    InfoCondition::only_prediction,
    InfoCondition::prediction_first,
    InfoCondition::shared_prediction,
};

inline std::string to_string(InfoCondition c) {
    switch (c) {
        case InfoCondition::no_prediction: return "no-prediction";
        case InfoCondition::only_prediction: return "only-prediction";
        case InfoCondition::prediction_first: return "prediction-first";
        case InfoCondition::shared_prediction: return "shared-prediction";
    }
    return "no-prediction";
}

inline InfoCondition parse_condition(std::string_view s) {
    if (s == "no-prediction") return InfoCondition::no_prediction;
    if (s == "only-prediction") return InfoCondition::only_prediction;
    if (s == "prediction-first") return InfoCondition::prediction_first;
    if (s == "shared-prediction") return InfoCondition::shared_prediction;
    throw std::invalid_argument("unknown info condition: " + std::string(s));
}

// True when the condition presents precomputed risk labels to the judge.
inline bool condition_requires_risk(InfoCondition c) {
    return c == InfoCondition::only_prediction || c == InfoCondition::shared_prediction;
}

}  // namespace rankaudit
