#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankaudit/condition.hpp"
#include "rankaudit/gateway.hpp"
#include "rankaudit/http_judge.hpp"
#include "rankaudit/judge.hpp"

namespace rankaudit {

enum class ExperimentKind { pairwise, ranking };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

// One judge entry in the config. type is one of "endpoint", "btl",
// "scripted", "coin".
struct JudgeSpec {
    std::string name;
    std::string type;
    JudgeEndpointConfig endpoint;                 // endpoint
    std::map<std::string, double> strengths;      // btl (inline)
    std::string strengths_path;                   // btl (file {"item": theta, ...})
    double clamp_lo = 0.0;                        // btl probability clamp
    double clamp_hi = 1.0;
    std::vector<std::string> responses;           // scripted
    bool cycle = true;                            // scripted
};

struct ExperimentConfig {
    ExperimentKind experiment_kind = ExperimentKind::ranking;
    std::string cohort_path;
    std::string cohort_id = "cohort";
    std::vector<JudgeSpec> judges;
    std::vector<InfoCondition> conditions = {InfoCondition::no_prediction};
    int runs_per_pair = 10;
    double pair_sampling_p = 0.4;
    int comparisons_per_pair = 1;
    int pipeline_runs_per_judge = 2;
    double epsilon = 1e-3;
    double tol = 1e-12;
    int max_iterations = 100000;
    std::uint64_t master_seed = 0;
    std::string output_dir;
    std::string prompt_template_path;
    std::string intensive_intervention = "TH";
    double failure_budget = 0.01;
    int max_retries = 5;       // gateway attempts for non-endpoint judges
    int max_concurrency = 1;   // elicitation fan-out for non-endpoint judges
    int tie_break_variants = 10;
    int attribution_top_k = 5;
    double attribution_l2 = 1.0;
    double confidence_level = 0.95;
    std::vector<std::pair<std::string, std::string>> pairs;  // explicit pairwise pairs

    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
// config_to_json minus fields that do not affect results (output_dir).
nlohmann::json canonical_config_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical JSON serialization; resumes refuse to proceed on
// a mismatch.
std::string config_hash(const ExperimentConfig& config);

// A judge plus its distiller and gateway policy, ready for elicitation.
struct JudgeBundle {
    std::shared_ptr<Judge> judge;
    std::shared_ptr<Judge> distiller;
    GatewayOptions gateway;
    int max_concurrency = 1;
};

// Instantiates the configured judge. The api token comes from the
// RANKAUDIT_API_TOKEN environment variable and is never logged.
JudgeBundle make_judge_bundle(const JudgeSpec& spec, const ExperimentConfig& config,
                              std::uint64_t judge_seed);

}  // namespace rankaudit
