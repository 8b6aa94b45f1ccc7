#include "rankaudit/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "rankaudit/parallel.hpp"

namespace rankaudit {

using nlohmann::json;

double RankingResult::score_of(const std::string& item_id) const {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i] == item_id) return scores[i];
    }
    throw std::invalid_argument("unknown item '" + item_id + "' in ranking");
}

std::vector<std::string> rank_items(const std::vector<std::string>& items,
                                    const std::vector<double>& scores) {
    if (items.size() != scores.size()) throw std::invalid_argument("rank_items: length mismatch");
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return items[a] < items[b];
    });
    std::vector<std::string> out;
    out.reserve(items.size());
    for (std::size_t idx : order) out.push_back(items[idx]);
    return out;
}

std::string ranking_to_json(const RankingResult& r) {
    json scores = json::object();
    for (std::size_t i = 0; i < r.items.size(); ++i) scores[r.items[i]] = r.scores[i];
    json j{{"scores", std::move(scores)},
           {"order", r.order},
           {"provenance",
            {{"seed", r.seed},
             {"judge_id", r.judge_id},
             {"pipeline_run_index", r.pipeline_run_index},
             {"converged", r.converged},
             {"iterations", r.iterations}}}};
    return j.dump(2);
}

RankingResult ranking_from_json(const std::string& text) {
    const json j = json::parse(text);
    RankingResult r;
    r.order = j.at("order").get<std::vector<std::string>>();
    // Restore dataset alignment from the scores map keyed by the order array:
    // the JSON object is sorted by key, so keep the order array authoritative.
    for (const auto& id : r.order) {
        r.items.push_back(id);
        r.scores.push_back(j.at("scores").at(id).get<double>());
    }
    const auto& p = j.at("provenance");
    r.seed = p.at("seed").get<std::uint64_t>();
    r.judge_id = p.at("judge_id").get<std::string>();
    r.pipeline_run_index = p.at("pipeline_run_index").get<int>();
    r.converged = p.at("converged").get<bool>();
    r.iterations = p.at("iterations").get<int>();
    return r;
}

std::string ranking_to_csv(const RankingResult& r) {
    std::ostringstream out;
    out << "item_id,rank\n";
    for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
        out << r.order[pos] << ',' << (pos + 1) << '\n';
    }
    return out.str();
}

std::string comparison_key(const std::string& id_a, const std::string& id_b, int rep) {
    const bool sorted = id_a <= id_b;
    return (sorted ? id_a : id_b) + "|" + (sorted ? id_b : id_a) + "|" + std::to_string(rep);
}

namespace {

struct SlotOutcome {
    std::optional<JudgeVerdict> verdict;
    std::vector<TranscriptRecord> records;
    bool unresolved = false;
    std::exception_ptr error;
};

}  // namespace

PipelineOutcome run_ranking_pipeline(const CohortDataset& dataset, Judge& judge,
                                     const PipelineConfig& config, std::uint64_t seed,
                                     int pipeline_run_index, TranscriptSink& sink,
                                     const PipelineHooks* hooks, const PipelineResume* resume) {
    validate_dataset(dataset);
    if (config.comparisons_per_pair < 1) {
        throw std::invalid_argument("comparisons_per_pair must be >= 1");
    }

    std::vector<std::string> item_ids;
    item_ids.reserve(dataset.items.size());
    for (const auto& it : dataset.items) item_ids.push_back(it.item_id);

    // Sampled pairs are either drawn fresh or replayed from a resume state.
    std::vector<PairIndex> pairs;
    if (resume && !resume->pairs.empty()) {
        pairs = resume->pairs;
    } else {
        Rng sample_rng(derive_seed(seed, "sample-pairs"));
        pairs = sample_pairs(item_ids.size(), config.pair_sampling_p, sample_rng);
    }
    if (hooks && hooks->on_pairs) hooks->on_pairs(pairs);

    const int reps = config.comparisons_per_pair;
    const std::size_t n_slots = pairs.size() * static_cast<std::size_t>(reps);

    auto run_slot = [&](std::size_t slot) -> SlotOutcome {
        SlotOutcome out;
        const std::size_t pair_idx = slot / static_cast<std::size_t>(reps);
        const int rep = static_cast<int>(slot % static_cast<std::size_t>(reps));
        const PairIndex& pr = pairs[pair_idx];
        const ItemProfile& first = dataset.items[pr.a];
        const ItemProfile& second = dataset.items[pr.b];

        if (resume) {
            const auto it =
                resume->completed.find(comparison_key(first.item_id, second.item_id, rep));
            if (it != resume->completed.end()) {
                out.verdict = it->second;
                return out;
            }
        }

        const std::uint64_t slot_seed =
            derive_seed(derive_seed(seed, "pair", first.item_id, second.item_id), "rep",
                        static_cast<std::uint64_t>(rep));
        Rng present_rng(derive_seed(slot_seed, "presentation"));
        const bool swap = present_rng.bernoulli(0.5);
        const ItemProfile& left = swap ? second : first;
        const ItemProfile& right = swap ? first : second;

        MemoryTranscriptSink buffer;
        try {
            JudgeVerdict v = elicit_comparison(judge, left, right, config.prompt, rep, buffer,
                                               config.gateway, slot_seed);
            out.verdict = std::move(v);
            out.records = std::move(buffer.records);
        } catch (const UnresolvedComparisonError& e) {
            out.unresolved = true;
            out.records = e.transcripts;
        } catch (...) {
            out.error = std::current_exception();
            out.records = std::move(buffer.records);
        }
        return out;
    };

    std::vector<SlotOutcome> slots =
        parallel_map_ordered<SlotOutcome>(n_slots, config.max_concurrency, run_slot);

    // Flush transcripts in slot order; surface the first transport error only
    // after the ledger holds everything produced up to (and including) it.
    PipelineOutcome outcome;
    outcome.pairs = pairs;
    std::size_t unresolved = 0;
    for (std::size_t slot = 0; slot < n_slots; ++slot) {
        SlotOutcome& s = slots[slot];
        std::string last_ref;
        for (const auto& rec : s.records) last_ref = sink.append(rec);
        if (s.error) std::rethrow_exception(s.error);
        if (s.unresolved) {
            ++unresolved;
            continue;
        }
        if (!s.verdict) continue;
        if (!s.verdict->transcript_ref.empty() && !last_ref.empty()) {
            s.verdict->transcript_ref = last_ref;
        }
        if (hooks && hooks->on_verdict) hooks->on_verdict(slot, *s.verdict);
        outcome.verdicts.push_back(*s.verdict);
    }
    outcome.unresolved = unresolved;
    if (n_slots > 0 &&
        static_cast<double>(unresolved) > config.failure_budget * static_cast<double>(n_slots)) {
        throw UnresolvedComparisonError(
            std::to_string(unresolved) + " of " + std::to_string(n_slots) +
                " comparisons unresolved, over the failure budget",
            {});
    }

    ComparisonGraph graph = build_graph(item_ids, outcome.verdicts);
    const TransitionMatrix matrix = to_transition_matrix(graph, config.epsilon);
    const StationaryResult st =
        stationary_distribution(matrix, config.tol, config.max_iterations);

    RankingResult ranking;
    ranking.items = item_ids;
    ranking.scores = st.scores;
    ranking.order = rank_items(item_ids, st.scores);
    ranking.seed = seed;
    ranking.judge_id = judge.id();
    ranking.pipeline_run_index = pipeline_run_index;
    ranking.converged = st.converged;
    ranking.iterations = st.iterations;
    if (hooks && hooks->on_ranking) hooks->on_ranking(ranking);

    outcome.ranking = std::move(ranking);
    return outcome;
}

}  // namespace rankaudit
