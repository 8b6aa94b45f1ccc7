#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "rankaudit/core.hpp"

using namespace rankaudit;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const std::string& content) {
        static int counter = 0;
        path = fs::temp_directory_path() / ("rankaudit_core_" + std::to_string(counter++) + ".jsonl");
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

std::string item_line(const std::string& id, const std::string& a1, const std::string& a2,
                      const std::string& extra = "") {
    return R"({"item_id":")" + id + R"(","cohort":"synthetic","answers":[)" +
           R"({"question_id":"q1","question_text":"First question","answer":")" + a1 + R"("},)" +
           R"({"question_id":"q7","question_text":"Seventh question","answer":")" + a2 + R"("}])" +
           extra + "}";
}

ItemProfile sample_item() {
    ItemProfile item;
    item.item_id = "hh-1";
    item.cohort = Cohort::synthetic;
    item.answers = {{"q1", "How many adults?", "2"}, {"q2", "Monthly income?", "1200"}};
    return item;
}

}  // namespace

TEST_CASE("load_cohort ingests a consistent 3-line file") {
    TempFile f(item_line("a", "yes", "no") + "\n" + item_line("b", "no", "no") + "\n" +
               item_line("c", "yes", "yes") + "\n");
    const CohortDataset ds = load_cohort(f.path.string(), "test");
    CHECK(ds.items.size() == 3);
    CHECK(ds.schema == std::vector<std::string>{"q1", "q7"});
    CHECK(ds.items[0].item_id == "a");
    CHECK(ds.items[2].answers[1].answer == "yes");
}

TEST_CASE("load_cohort names the line and question of a schema mismatch") {
    const std::string bad_line =
        R"({"item_id":"b","cohort":"synthetic","answers":[{"question_id":"q1","answer":"no"}]})";
    TempFile f(item_line("a", "yes", "no") + "\n" + bad_line + "\n");
    try {
        load_cohort(f.path.string(), "test");
        FAIL("expected CohortError");
    } catch (const CohortError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("q7") != std::string::npos);
    }
}

TEST_CASE("load_cohort rejects an empty file") {
    TempFile f("");
    try {
        load_cohort(f.path.string(), "test");
        FAIL("expected CohortError");
    } catch (const CohortError& e) {
        CHECK(std::string(e.what()).find("at least 2 items") != std::string::npos);
    }
}

TEST_CASE("load_cohort reports malformed lines with their line number") {
    TempFile f(item_line("a", "yes", "no") + "\nnot json at all\n");
    try {
        load_cohort(f.path.string(), "test");
        FAIL("expected CohortError");
    } catch (const CohortError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("load_cohort rejects duplicate item ids") {
    TempFile f(item_line("a", "yes", "no") + "\n" + item_line("a", "no", "no") + "\n");
    CHECK_THROWS_AS(load_cohort(f.path.string(), "test"), CohortError);
}

TEST_CASE("missing answers are materialized as the No answer category") {
    const std::string line =
        R"({"item_id":"a","cohort":"family","answers":[{"question_id":"q1","answer":""},{"question_id":"q7"}]})";
    const ItemProfile item = parse_item_line(line);
    CHECK(item.answers[0].answer == kNoAnswer);
    CHECK(item.answers[1].answer == kNoAnswer);
}

TEST_CASE("round trip: load then re-serialize is field-for-field identical") {
    TempFile f(item_line("a", "yes", "no",
                         R"(,"baseline_scores":{"rmfs":4.5,"vi-spdat":7.0},"risk":{"ES":"low","TH":"high"},"received_intensive_service":true)") +
               "\n" + item_line("b", "no", "yes") + "\n");
    const CohortDataset ds = load_cohort(f.path.string(), "test");
    const fs::path copy = f.path.string() + ".copy";
    save_cohort(ds, copy.string());
    const CohortDataset ds2 = load_cohort(copy.string(), "test");
    REQUIRE(ds2.items.size() == ds.items.size());
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        const auto& x = ds.items[i];
        const auto& y = ds2.items[i];
        CHECK(x.item_id == y.item_id);
        CHECK(x.cohort == y.cohort);
        REQUIRE(x.answers.size() == y.answers.size());
        for (std::size_t q = 0; q < x.answers.size(); ++q) {
            CHECK(x.answers[q].question_id == y.answers[q].question_id);
            CHECK(x.answers[q].question_text == y.answers[q].question_text);
            CHECK(x.answers[q].answer == y.answers[q].answer);
        }
        CHECK(x.baseline_scores == y.baseline_scores);
        CHECK(x.risk == y.risk);
        CHECK(x.received_intensive_service == y.received_intensive_service);
    }
    fs::remove(copy);
}

TEST_CASE("render_profile_block: answers only under no-prediction") {
    const ItemProfile item = sample_item();
    const std::string text = render_profile_block(item, InfoCondition::no_prediction);
    CHECK(text == "How many adults?: 2\nMonthly income?: 1200\n");
}

TEST_CASE("render_profile_block: shared-prediction appends risk lines") {
    ItemProfile item = sample_item();
    item.risk = {{"ES", RiskLevel::high}, {"TH", RiskLevel::low}};
    const std::string text = render_profile_block(item, InfoCondition::shared_prediction);
    CHECK(text.find("How many adults?: 2") != std::string::npos);
    CHECK(text.find("ES: high") != std::string::npos);
    CHECK(text.find("TH: low") != std::string::npos);
    // 2 answer lines + 2 risk lines
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("render_profile_block: only-prediction shows risk lines only") {
    ItemProfile item = sample_item();
    item.risk = {{"TH", RiskLevel::medium}};
    const std::string text = render_profile_block(item, InfoCondition::only_prediction);
    CHECK(text.find("How many adults?") == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    CHECK(text.find("TH: medium") != std::string::npos);
}

TEST_CASE("render_profile_block: prediction-first renders answers only") {
    const ItemProfile item = sample_item();
    CHECK(render_profile_block(item, InfoCondition::prediction_first) ==
          render_profile_block(item, InfoCondition::no_prediction));
}

TEST_CASE("render_profile_block errors when risk labels are required but missing") {
    const ItemProfile item = sample_item();
    CHECK_THROWS_AS(render_profile_block(item, InfoCondition::only_prediction), CohortError);
    CHECK_THROWS_AS(render_profile_block(item, InfoCondition::shared_prediction), CohortError);
}

TEST_CASE("render_profile_block is pure: identical inputs give identical bytes") {
    ItemProfile item = sample_item();
    item.risk = {{"TH", RiskLevel::low}};
    for (const auto condition : kAllConditions) {
        CHECK(render_profile_block(item, condition) == render_profile_block(item, condition));
    }
}

TEST_CASE("schema order is total across items of one cohort") {
    TempFile f(item_line("a", "yes", "no") + "\n" + item_line("b", "no", "yes") + "\n");
    const CohortDataset ds = load_cohort(f.path.string(), "test");
    for (const auto& item : ds.items) {
        const std::string text = render_profile_block(item, InfoCondition::no_prediction);
        const auto first = text.find("First question");
        const auto seventh = text.find("Seventh question");
        REQUIRE(first != std::string::npos);
        REQUIRE(seventh != std::string::npos);
        CHECK(first < seventh);
    }
}

TEST_CASE("the shipped vignette fixture loads and carries risk labels") {
    const CohortDataset ds =
        load_cohort(std::string(RANKAUDIT_DATA_DIR) + "/fixtures/vignette_pairs.jsonl", "vignettes");
    CHECK(ds.items.size() == 20);  // ten pairs
    for (const auto& item : ds.items) {
        CHECK(item.risk.count("TH") == 1);
        CHECK(item.risk.count("ES") == 1);
    }
}
