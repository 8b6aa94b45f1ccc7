#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rankaudit/condition.hpp"

namespace rankaudit {

// Raised on any cohort ingestion or validation failure.
class CohortError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One questionnaire response. An absent response is materialized as the
// category "No answer" at ingestion, never dropped.
struct QuestionAnswer {
    std::string question_id;
    std::string question_text;
    std::string answer;
};

inline constexpr const char* kNoAnswer = "No answer";

enum class RiskLevel { low, medium, high };

inline std::string to_string(RiskLevel r) {
    switch (r) {
        case RiskLevel::low: return "low";
        case RiskLevel::medium: return "medium";
        case RiskLevel::high: return "high";
    }
    return "low";
}

inline RiskLevel parse_risk_level(std::string_view s) {
    if (s == "low") return RiskLevel::low;
    if (s == "medium") return RiskLevel::medium;
    if (s == "high") return RiskLevel::high;
    throw CohortError("unknown risk level: " + std::string(s));
}

enum class Cohort { single_adult, family, youth, synthetic };

inline std::string to_string(Cohort c) {
    switch (c) {
        case Cohort::single_adult: return "single-adult";
        case Cohort::family: return "family";
        case Cohort::youth: return "youth";
        case Cohort::synthetic: return "synthetic";
    }
    return "synthetic";
}

inline Cohort parse_cohort_tag(std::string_view s) {
    if (s == "single-adult") return Cohort::single_adult;
    if (s == "family") return Cohort::family;
    if (s == "youth") return Cohort::youth;
    if (s == "synthetic") return Cohort::synthetic;
    throw CohortError("unknown cohort tag: " + std::string(s));
}

// One rankable unit: questionnaire responses plus optional baseline scores,
// risk labels keyed by intervention name, and the service-receipt label.
struct ItemProfile {
    std::string item_id;
    Cohort cohort = Cohort::synthetic;
    std::vector<QuestionAnswer> answers;
    std::map<std::string, double> baseline_scores;
    std::map<std::string, RiskLevel> risk;
    std::optional<bool> received_intensive_service;

    const QuestionAnswer* find_answer(std::string_view question_id) const {
        for (const auto& qa : answers) {
            if (qa.question_id == question_id) return &qa;
        }
        return nullptr;
    }
};

struct CohortDataset {
    std::string cohort_id;
    std::vector<ItemProfile> items;
    std::vector<std::string> schema;  // ordered question ids shared by every item

    const ItemProfile* find_item(std::string_view item_id) const {
        for (const auto& it : items) {
            if (it.item_id == item_id) return &it;
        }
        return nullptr;
    }
};

// Validates schema conformance, uniqueness and size; throws CohortError.
void validate_dataset(const CohortDataset& ds);

// Reads a line-delimited JSON cohort file (one item per line, file order
// preserved). Errors carry the offending line number.
CohortDataset load_cohort(const std::string& path, const std::string& cohort_id);

// Inverse of load_cohort; load(save(ds)) is field-for-field identical.
void save_cohort(const CohortDataset& ds, const std::string& path);

// Parse/serialize a single item record (one JSONL line).
ItemProfile parse_item_line(const std::string& line);
std::string item_to_line(const ItemProfile& item);

// Renders the profile text block that fills the prompt placeholder for one
// item: "question: answer" lines in schema order and/or risk lines, depending
// on the condition. Pure; byte-identical output for identical inputs.
std::string render_profile_block(const ItemProfile& item, InfoCondition condition);

}  // namespace rankaudit
