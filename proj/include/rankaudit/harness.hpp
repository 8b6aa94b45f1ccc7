#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "rankaudit/config.hpp"
#include "rankaudit/core.hpp"
#include "rankaudit/attribution.hpp"
#include "rankaudit/pipeline.hpp"

namespace rankaudit {

// Test seam: replaces configured judges by name (policy judges, failure
// injection) without touching the config or its hash.
struct HarnessOverrides {
    std::map<std::string, JudgeBundle> judges;
};

struct ExperimentResult {
    nlohmann::json report;
    std::string output_dir;
};

// Runs the configured experiment end to end: elicitation into the run
// ledger, then analysis and report files under <output_dir>/reports. Safe to
// call on a directory holding a partial ledger for the same config; completed
// work is never redone.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const HarnessOverrides* overrides = nullptr);

// Continues an interrupted run from its output directory. Refuses to proceed
// when the stored config hash does not match the ledger.
ExperimentResult resume_experiment(const std::string& output_dir,
                                   const HarnessOverrides* overrides = nullptr);

// Pure view: recomputes every report from the ledger and cohort alone and
// rewrites the report files. Never appends to the ledger.
ExperimentResult analyze_ledger(const std::string& output_dir);

// Report sections shared by run/analyze; exposed for tests. When `models_out`
// is given it receives the fitted attribution model per ranking.
nlohmann::json build_ranking_report(const ExperimentConfig& config, const CohortDataset& dataset,
                                    const std::vector<RankingResult>& rankings,
                                    std::vector<AttributionModel>* models_out = nullptr);
nlohmann::json build_pairwise_report(const ExperimentConfig& config, const CohortDataset& dataset,
                                     const std::vector<nlohmann::json>& verdict_records,
                                     std::size_t unresolved);

}  // namespace rankaudit
