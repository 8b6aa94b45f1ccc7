#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rankaudit/core.hpp"
#include "rankaudit/gateway.hpp"
#include "rankaudit/graph.hpp"
#include "rankaudit/transition.hpp"

namespace rankaudit {

// Stationary score vector with its strict ordering and provenance.
struct RankingResult {
    std::vector<std::string> items;  // dataset order, aligned with scores
    std::vector<double> scores;      // nonnegative, sums to 1
    std::vector<std::string> order;  // item ids, highest score first
    std::uint64_t seed = 0;
    std::string judge_id;
    int pipeline_run_index = 0;
    bool converged = true;
    int iterations = 0;

    double score_of(const std::string& item_id) const;
};

// Descending score; equal scores ordered by item_id ascending so downstream
// analysis is reproducible.
std::vector<std::string> rank_items(const std::vector<std::string>& items,
                                    const std::vector<double>& scores);

std::string ranking_to_json(const RankingResult& r);
RankingResult ranking_from_json(const std::string& text);
std::string ranking_to_csv(const RankingResult& r);  // item_id,rank

struct PipelineConfig {
    double pair_sampling_p = 0.4;
    int comparisons_per_pair = 1;
    double epsilon = 1e-3;
    double tol = 1e-12;
    int max_iterations = 100000;
    PromptSpec prompt;
    GatewayOptions gateway;
    int max_concurrency = 1;
    double failure_budget = 0.01;  // abort when unresolved fraction exceeds this
};

// Replay state for resumption: pair lists are replayed, completed verdicts
// are not re-elicited. Keys are "<min_id>|<max_id>|<rep>".
struct PipelineResume {
    std::vector<PairIndex> pairs;
    std::map<std::string, JudgeVerdict> completed;
};

std::string comparison_key(const std::string& id_a, const std::string& id_b, int rep);

// Observation points so the caller can persist verdicts and results as they
// are produced (before the pipeline returns).
struct PipelineHooks {
    std::function<void(const std::vector<PairIndex>&)> on_pairs;
    std::function<void(std::size_t slot, const JudgeVerdict&)> on_verdict;
    std::function<void(const RankingResult&)> on_ranking;
};

struct PipelineOutcome {
    RankingResult ranking;
    std::vector<JudgeVerdict> verdicts;
    std::vector<PairIndex> pairs;
    std::size_t unresolved = 0;
};

// One full pipeline run: sample pairs, elicit one verdict per sampled pair
// per repetition, build the graph, normalize, solve for the stationary
// distribution and rank. Transcripts reach `sink` in slot order.
PipelineOutcome run_ranking_pipeline(const CohortDataset& dataset, Judge& judge,
                                     const PipelineConfig& config, std::uint64_t seed,
                                     int pipeline_run_index, TranscriptSink& sink,
                                     const PipelineHooks* hooks = nullptr,
                                     const PipelineResume* resume = nullptr);

}  // namespace rankaudit
