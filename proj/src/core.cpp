#include "rankaudit/core.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rankaudit {

using nlohmann::json;

namespace {

std::string schema_key(const std::vector<QuestionAnswer>& answers) {
    std::string key;
    for (const auto& qa : answers) {
        key += qa.question_id;
        key.push_back('\x1f');
    }
    return key;
}

}  // namespace

void validate_dataset(const CohortDataset& ds) {
    if (ds.items.size() < 2) {
        throw CohortError("cohort must contain at least 2 items");
    }
    std::set<std::string> seen_ids;
    const std::string expect = schema_key(ds.items.front().answers);
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        const auto& item = ds.items[i];
        if (item.item_id.empty()) {
            throw CohortError("item " + std::to_string(i) + " has an empty item_id");
        }
        if (!seen_ids.insert(item.item_id).second) {
            throw CohortError("duplicate item_id '" + item.item_id + "'");
        }
        std::set<std::string> qids;
        for (const auto& qa : item.answers) {
            if (qa.question_id.empty()) {
                throw CohortError("item '" + item.item_id + "' has an empty question_id");
            }
            if (!qids.insert(qa.question_id).second) {
                throw CohortError("item '" + item.item_id + "' repeats question '" +
                                  qa.question_id + "'");
            }
            if (qa.answer.empty()) {
                throw CohortError("item '" + item.item_id + "' has an empty answer for '" +
                                  qa.question_id + "' (expected the category \"No answer\")");
            }
        }
        if (schema_key(item.answers) != expect) {
            // Name the first divergent question for the error message.
            const auto& ref = ds.items.front().answers;
            std::string missing;
            for (const auto& qa : ref) {
                if (!item.find_answer(qa.question_id)) {
                    missing = qa.question_id;
                    break;
                }
            }
            if (missing.empty() && !item.answers.empty()) missing = item.answers.front().question_id;
            throw CohortError("item '" + item.item_id + "' does not match the cohort schema" +
                              (missing.empty() ? "" : " (question '" + missing + "')"));
        }
        for (const auto& [name, value] : item.baseline_scores) {
            if (!std::isfinite(value)) {
                throw CohortError("item '" + item.item_id + "' baseline score '" + name +
                                  "' is not finite");
            }
        }
    }
    if (ds.schema.size() != ds.items.front().answers.size()) {
        throw CohortError("schema length does not match item answers");
    }
    for (std::size_t q = 0; q < ds.schema.size(); ++q) {
        if (ds.schema[q] != ds.items.front().answers[q].question_id) {
            throw CohortError("schema order does not match item answers at position " +
                              std::to_string(q));
        }
    }
}

ItemProfile parse_item_line(const std::string& line) {
    const json j = json::parse(line);
    ItemProfile item;
    item.item_id = j.at("item_id").get<std::string>();
    item.cohort = parse_cohort_tag(j.at("cohort").get<std::string>());
    for (const auto& a : j.at("answers")) {
        QuestionAnswer qa;
        qa.question_id = a.at("question_id").get<std::string>();
        qa.question_text = a.value("question_text", "");
        qa.answer = a.value("answer", "");
        if (qa.answer.empty()) qa.answer = kNoAnswer;
        item.answers.push_back(std::move(qa));
    }
    if (j.contains("baseline_scores") && !j["baseline_scores"].is_null()) {
        for (const auto& [name, v] : j["baseline_scores"].items()) {
            item.baseline_scores[name] = v.get<double>();
        }
    }
    if (j.contains("risk") && !j["risk"].is_null()) {
        for (const auto& [name, v] : j["risk"].items()) {
            item.risk[name] = parse_risk_level(v.get<std::string>());
        }
    }
    if (j.contains("received_intensive_service") && !j["received_intensive_service"].is_null()) {
        item.received_intensive_service = j["received_intensive_service"].get<bool>();
    }
    return item;
}

std::string item_to_line(const ItemProfile& item) {
    json j;
    j["item_id"] = item.item_id;
    j["cohort"] = to_string(item.cohort);
    json answers = json::array();
    for (const auto& qa : item.answers) {
        answers.push_back({{"question_id", qa.question_id},
                           {"question_text", qa.question_text},
                           {"answer", qa.answer}});
    }
    j["answers"] = std::move(answers);
    if (!item.baseline_scores.empty()) {
        json b = json::object();
        for (const auto& [name, v] : item.baseline_scores) b[name] = v;
        j["baseline_scores"] = std::move(b);
    }
    if (!item.risk.empty()) {
        json r = json::object();
        for (const auto& [name, v] : item.risk) r[name] = to_string(v);
        j["risk"] = std::move(r);
    }
    if (item.received_intensive_service.has_value()) {
        j["received_intensive_service"] = *item.received_intensive_service;
    }
    return j.dump();
}

CohortDataset load_cohort(const std::string& path, const std::string& cohort_id) {
    std::ifstream in(path);
    if (!in) throw CohortError("cannot open cohort file: " + path);

    CohortDataset ds;
    ds.cohort_id = cohort_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            ds.items.push_back(parse_item_line(line));
        } catch (const CohortError& e) {
            throw CohortError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const json::exception& e) {
            throw CohortError("line " + std::to_string(line_no) + ": malformed record: " + e.what());
        }
    }
    if (ds.items.size() < 2) {
        throw CohortError("cohort must contain at least 2 items");
    }
    for (const auto& qa : ds.items.front().answers) ds.schema.push_back(qa.question_id);

    // Re-run per-item checks so schema errors name the offending line.
    const std::string expect = schema_key(ds.items.front().answers);
    std::set<std::string> seen_ids;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        const auto& item = ds.items[i];
        if (!seen_ids.insert(item.item_id).second) {
            throw CohortError("line " + std::to_string(i + 1) + ": duplicate item_id '" +
                              item.item_id + "'");
        }
        if (schema_key(item.answers) != expect) {
            std::string missing;
            for (const auto& qid : ds.schema) {
                if (!item.find_answer(qid)) {
                    missing = qid;
                    break;
                }
            }
            throw CohortError("line " + std::to_string(i + 1) + ": item '" + item.item_id +
                              "' does not match the cohort schema" +
                              (missing.empty() ? "" : " (question '" + missing + "')"));
        }
    }
    validate_dataset(ds);
    return ds;
}

void save_cohort(const CohortDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw CohortError("cannot open cohort file for writing: " + path);
    for (const auto& item : ds.items) out << item_to_line(item) << '\n';
}

std::string render_profile_block(const ItemProfile& item, InfoCondition condition) {
    if (condition_requires_risk(condition) && item.risk.empty()) {
        throw CohortError("item '" + item.item_id + "' has no risk labels but condition '" +
                          to_string(condition) + "' requires them");
    }
    std::ostringstream out;
    const bool with_answers = condition != InfoCondition::only_prediction;
    if (with_answers) {
        for (const auto& qa : item.answers) {
            const std::string& label = qa.question_text.empty() ? qa.question_id : qa.question_text;
            out << label << ": " << qa.answer << '\n';
        }
    }
    if (condition_requires_risk(condition)) {
        for (const auto& [intervention, level] : item.risk) {
            out << "Predicted risk of reentering homelessness within two years if given "
                << intervention << ": " << to_string(level) << '\n';
        }
    }
    return out.str();
}

}  // namespace rankaudit
