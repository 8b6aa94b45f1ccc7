#include "rankaudit/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rankaudit/attribution.hpp"
#include "rankaudit/ledger.hpp"
#include "rankaudit/parallel.hpp"
#include "rankaudit/stats.hpp"

namespace rankaudit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt5(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return std::string(buf);
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string pair_key_of(const std::string& a, const std::string& b) {
    return a <= b ? a + "|" + b : b + "|" + a;
}

PromptSpec prompt_for(const ExperimentConfig& config, InfoCondition condition) {
    if (!config.prompt_template_path.empty()) {
        return load_prompt_spec(config.prompt_template_path, condition);
    }
    return default_prompt_spec(condition);
}

std::vector<std::pair<std::size_t, std::size_t>> designated_pairs(
    const ExperimentConfig& config, const CohortDataset& dataset) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < dataset.items.size(); ++i) index[dataset.items[i].item_id] = i;
    if (!config.pairs.empty()) {
        for (const auto& [a, b] : config.pairs) {
            const auto ia = index.find(a);
            const auto ib = index.find(b);
            if (ia == index.end() || ib == index.end()) {
                throw CohortError("configured pair names unknown item '" +
                                  (ia == index.end() ? a : b) + "'");
            }
            pairs.emplace_back(ia->second, ib->second);
        }
        return pairs;
    }
    if (dataset.items.size() % 2 != 0) {
        throw CohortError("pairwise cohort has an odd item count and no explicit pairs");
    }
    for (std::size_t i = 0; i + 1 < dataset.items.size(); i += 2) pairs.emplace_back(i, i + 1);
    return pairs;
}

// Aligns a ranking's scores with dataset item order.
std::vector<double> aligned_scores(const RankingResult& r, const CohortDataset& dataset) {
    std::map<std::string, double> by_id;
    for (std::size_t i = 0; i < r.items.size(); ++i) by_id[r.items[i]] = r.scores[i];
    std::vector<double> out;
    out.reserve(dataset.items.size());
    for (const auto& item : dataset.items) {
        const auto it = by_id.find(item.item_id);
        if (it == by_id.end()) {
            throw std::runtime_error("ranking is missing item '" + item.item_id + "'");
        }
        out.push_back(it->second);
    }
    return out;
}

json correlation_json(const CorrelationReport& r) {
    return json{{"rho", r.rho},
                {"n", r.n},
                {"ci_low", r.ci_low},
                {"ci_high", r.ci_high},
                {"level", r.level}};
}

struct LedgerState {
    std::vector<LedgerRecord> records;
    bool has_report = false;

    static LedgerState load(const std::string& dir) {
        LedgerState s;
        if (RunLedger::exists(dir)) {
            s.records = RunLedger::read_all(dir);
            for (const auto& rec : s.records) {
                if (rec.kind == "report") s.has_report = true;
            }
        }
        return s;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Ranking analysis
// ---------------------------------------------------------------------------

json build_ranking_report(const ExperimentConfig& config, const CohortDataset& dataset,
                          const std::vector<RankingResult>& rankings,
                          std::vector<AttributionModel>* models_out) {
    const double level = config.confidence_level;
    json report;
    report["experiment"] = "ranking";
    report["config_hash"] = config_hash(config);
    report["cohort_id"] = config.cohort_id;
    report["n_items"] = dataset.items.size();

    json ranking_meta = json::array();
    for (const auto& r : rankings) {
        ranking_meta.push_back(json{{"judge", r.judge_id},
                                    {"run", r.pipeline_run_index},
                                    {"converged", r.converged},
                                    {"iterations", r.iterations}});
    }
    report["rankings"] = std::move(ranking_meta);

    // Baseline score vectors present on every item.
    std::map<std::string, std::vector<double>> baselines;
    if (!dataset.items.empty()) {
        for (const auto& [name, v] : dataset.items.front().baseline_scores) {
            (void)v;
            bool everywhere = true;
            std::vector<double> values;
            for (const auto& item : dataset.items) {
                const auto it = item.baseline_scores.find(name);
                if (it == item.baseline_scores.end()) {
                    everywhere = false;
                    break;
                }
                values.push_back(it->second);
            }
            if (everywhere) baselines[name] = std::move(values);
        }
    }

    // (a) run-to-run consistency per judge.
    json run_to_run = json::array();
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        for (std::size_t j = i + 1; j < rankings.size(); ++j) {
            if (rankings[i].judge_id != rankings[j].judge_id) continue;
            const auto si = aligned_scores(rankings[i], dataset);
            const auto sj = aligned_scores(rankings[j], dataset);
            json entry = correlation_json(spearman_report(si, sj, level));
            entry["judge"] = rankings[i].judge_id;
            entry["run_a"] = rankings[i].pipeline_run_index;
            entry["run_b"] = rankings[j].pipeline_run_index;
            run_to_run.push_back(std::move(entry));
        }
    }
    report["run_to_run"] = std::move(run_to_run);

    // (b) agreement with each baseline.
    json vs_baseline = json::array();
    for (const auto& r : rankings) {
        const auto scores = aligned_scores(r, dataset);
        for (const auto& [name, values] : baselines) {
            json entry = correlation_json(spearman_report(scores, values, level));
            entry["judge"] = r.judge_id;
            entry["run"] = r.pipeline_run_index;
            entry["baseline"] = name;
            vs_baseline.push_back(std::move(entry));
        }
    }
    report["vs_baseline"] = std::move(vs_baseline);

    // (c) predictive validity against service receipt, when labels exist.
    bool labels_present = !dataset.items.empty();
    std::vector<bool> labels;
    for (const auto& item : dataset.items) {
        if (!item.received_intensive_service.has_value()) {
            labels_present = false;
            break;
        }
        labels.push_back(*item.received_intensive_service);
    }
    std::size_t n_pos = 0;
    for (bool b : labels) n_pos += b ? 1 : 0;
    if (labels_present && (n_pos == 0 || n_pos == labels.size())) labels_present = false;

    json auc_section;
    auc_section["present"] = labels_present;
    auc_section["entries"] = json::array();
    if (labels_present) {
        auto auc_entry = [&](const std::string& name, const std::vector<double>& scores) {
            const AucReport a = roc_auc(scores, labels, level);
            return json{{"ranking", name},
                        {"auc", a.auc},
                        {"ci_low", a.ci_low},
                        {"ci_high", a.ci_high},
                        {"n_positive", a.n_positive},
                        {"n_negative", a.n_negative}};
        };
        for (const auto& [name, values] : baselines) {
            auc_section["entries"].push_back(auc_entry("baseline:" + name, values));
        }
        for (const auto& r : rankings) {
            auc_section["entries"].push_back(
                auc_entry(r.judge_id + "/run" + std::to_string(r.pipeline_run_index),
                          aligned_scores(r, dataset)));
        }
    }
    report["auc"] = std::move(auc_section);

    // (d) baseline tie-break stability.
    json tie_break = json::array();
    for (const auto& [name, values] : baselines) {
        Rng rng(derive_seed(config.master_seed, "tiebreak", name));
        const TieBreakReport tb =
            tie_break_stability(values, static_cast<std::size_t>(config.tie_break_variants), rng);
        const CorrelationReport ci = spearman_ci(tb.min_pairwise_rho, values.size(), level);
        tie_break.push_back(json{{"baseline", name},
                                 {"variants", tb.variants},
                                 {"min_rho", tb.min_pairwise_rho},
                                 {"ci_low", ci.ci_low},
                                 {"ci_high", ci.ci_high},
                                 {"lower_bound", tie_break_lower_bound(values)}});
    }
    report["tie_break"] = std::move(tie_break);

    // (e) attribution models per ranking plus run-pair overlap.
    json attribution;
    attribution["top_k"] = config.attribution_top_k;
    attribution["models"] = json::array();
    attribution["overlaps"] = json::array();
    std::vector<AttributionModel> models;
    if (!dataset.schema.empty()) {
        const FeatureMatrix X = encode_features(dataset);
        models.reserve(rankings.size());
        FitOptions fit_options;
        for (const auto& r : rankings) {
            models.push_back(fit_ordinal_to_ranking(X, r.order, config.attribution_l2, fit_options));
            const auto& m = models.back();
            json top = json::array();
            for (const auto& [feature, coeff] :
                 top_features(m, static_cast<std::size_t>(config.attribution_top_k))) {
                top.push_back(json{{"feature", feature}, {"normalized_coefficient", coeff}});
            }
            attribution["models"].push_back(json{{"judge", r.judge_id},
                                                 {"run", r.pipeline_run_index},
                                                 {"converged", m.converged},
                                                 {"top_features", std::move(top)}});
        }
        for (std::size_t i = 0; i < rankings.size(); ++i) {
            for (std::size_t j = i + 1; j < rankings.size(); ++j) {
                if (rankings[i].judge_id != rankings[j].judge_id) continue;
                const OverlapReport ov = compare_attributions(
                    models[i], models[j], static_cast<std::size_t>(config.attribution_top_k));
                json shared = json::array();
                for (const auto& sf : ov.shared) {
                    shared.push_back(json{{"feature", sf.feature},
                                          {"coefficient_a", sf.coefficient_a},
                                          {"coefficient_b", sf.coefficient_b},
                                          {"sign_agreement", sf.sign_agreement}});
                }
                attribution["overlaps"].push_back(json{{"judge", rankings[i].judge_id},
                                                       {"run_a", rankings[i].pipeline_run_index},
                                                       {"run_b", rankings[j].pipeline_run_index},
                                                       {"overlap", ov.overlap},
                                                       {"polarity_agreements", ov.polarity_agreements},
                                                       {"polarity_disagreements",
                                                        ov.polarity_disagreements},
                                                       {"shared", std::move(shared)}});
            }
        }
    }
    report["attribution"] = std::move(attribution);
    if (models_out) *models_out = std::move(models);
    return report;
}

// ---------------------------------------------------------------------------
// Pairwise analysis
// ---------------------------------------------------------------------------

json build_pairwise_report(const ExperimentConfig& config, const CohortDataset& dataset,
                           const std::vector<json>& verdict_records, std::size_t unresolved) {
    json report;
    report["experiment"] = "pairwise";
    report["config_hash"] = config_hash(config);
    report["cohort_id"] = config.cohort_id;
    report["unresolved"] = unresolved;

    struct Counts {
        std::uint64_t outcome = 0, vulnerability = 0, indeterminate = 0;
    };
    // key: judge -> condition tag -> pair key
    std::map<std::string, std::map<std::string, std::map<std::string, Counts>>> counts;

    for (const auto& rec : verdict_records) {
        const std::string judge = rec.at("judge").get<std::string>();
        const std::string condition = rec.at("condition").get<std::string>();
        const JudgeVerdict v = verdict_from_json(rec.at("verdict"));
        const ItemProfile* left = dataset.find_item(v.left_id);
        const ItemProfile* right = dataset.find_item(v.right_id);
        if (!left || !right) throw CohortError("verdict references an unknown item");
        const auto lrisk = left->risk.find(config.intensive_intervention);
        const auto rrisk = right->risk.find(config.intensive_intervention);
        if (lrisk == left->risk.end() || rrisk == right->risk.end()) {
            throw CohortError("missing risk label under intervention '" +
                              config.intensive_intervention + "'");
        }
        const Orientation o = classify_orientation(v, lrisk->second, rrisk->second);
        Counts& c = counts[judge][condition][pair_key_of(v.left_id, v.right_id)];
        if (o == Orientation::outcome) ++c.outcome;
        else if (o == Orientation::vulnerability) ++c.vulnerability;
        else ++c.indeterminate;
    }

    json per_pair = json::array();
    json condition_means = json::array();
    for (const auto& judge_spec : config.judges) {
        const auto judge_it = counts.find(judge_spec.name);
        for (const auto& condition : config.conditions) {
            const std::string tag = to_string(condition);
            double score_sum = 0.0;
            std::size_t scored_pairs = 0;
            if (judge_it != counts.end()) {
                const auto cond_it = judge_it->second.find(tag);
                if (cond_it != judge_it->second.end()) {
                    for (const auto& [pair_key, c] : cond_it->second) {
                        json entry{{"judge", judge_spec.name},
                                   {"condition", tag},
                                   {"pair", pair_key},
                                   {"n_outcome", c.outcome},
                                   {"n_vulnerability", c.vulnerability},
                                   {"n_indeterminate", c.indeterminate}};
                        if (c.outcome + c.vulnerability > 0) {
                            const int score = outcome_score(c.outcome, c.vulnerability);
                            entry["score"] = score;
                            score_sum += score;
                            ++scored_pairs;
                        } else {
                            entry["score"] = nullptr;
                        }
                        per_pair.push_back(std::move(entry));
                    }
                }
            }
            json mean{{"judge", judge_spec.name},
                      {"condition", tag},
                      {"pairs_counted", scored_pairs}};
            if (scored_pairs > 0) {
                mean["mean_score"] = score_sum / static_cast<double>(scored_pairs);
            } else {
                mean["mean_score"] = nullptr;
            }
            condition_means.push_back(std::move(mean));
        }
    }
    report["per_pair"] = std::move(per_pair);
    report["condition_means"] = std::move(condition_means);
    return report;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace {

void write_pairwise_files(const ExperimentConfig& config, const json& report) {
    const fs::path reports = fs::path(config.output_dir) / "reports";
    std::ostringstream scores;
    scores << "judge,condition,pair,n_outcome,n_vulnerability,n_indeterminate,score\n";
    for (const auto& e : report.at("per_pair")) {
        scores << e.at("judge").get<std::string>() << ',' << e.at("condition").get<std::string>()
               << ",\"" << e.at("pair").get<std::string>() << "\","
               << e.at("n_outcome").get<std::uint64_t>() << ','
               << e.at("n_vulnerability").get<std::uint64_t>() << ','
               << e.at("n_indeterminate").get<std::uint64_t>() << ',';
        if (e.at("score").is_null()) scores << "NA";
        else scores << e.at("score").get<int>();
        scores << '\n';
    }
    write_file(reports / "pairwise_scores.csv", scores.str());

    std::ostringstream heat;
    heat << "judge";
    for (const auto& c : config.conditions) heat << ',' << to_string(c);
    heat << '\n';
    for (const auto& judge_spec : config.judges) {
        heat << judge_spec.name;
        for (const auto& c : config.conditions) {
            const std::string tag = to_string(c);
            heat << ',';
            for (const auto& m : report.at("condition_means")) {
                if (m.at("judge") == judge_spec.name && m.at("condition") == tag) {
                    if (m.at("mean_score").is_null()) heat << "NA";
                    else heat << fmt5(m.at("mean_score").get<double>());
                    break;
                }
            }
        }
        heat << '\n';
    }
    write_file(reports / "pairwise_heatmap.csv", heat.str());
    write_file(reports / "pairwise_report.json", report.dump(2) + "\n");
}

void write_ranking_files(const ExperimentConfig& config, const json& report,
                         const std::vector<RankingResult>& rankings,
                         const std::vector<AttributionModel>& models) {
    const fs::path out_dir(config.output_dir);
    const fs::path reports = out_dir / "reports";

    for (const auto& r : rankings) {
        const std::string stem = r.judge_id + "_run" + std::to_string(r.pipeline_run_index);
        write_file(out_dir / "rankings" / (stem + ".json"), ranking_to_json(r) + "\n");
        write_file(out_dir / "rankings" / (stem + ".csv"), ranking_to_csv(r));
    }

    std::ostringstream consistency;
    consistency << "judge,run_a,run_b,rho,ci_low,ci_high,n\n";
    for (const auto& e : report.at("run_to_run")) {
        consistency << e.at("judge").get<std::string>() << ',' << e.at("run_a").get<int>() << ','
                    << e.at("run_b").get<int>() << ',' << fmt5(e.at("rho").get<double>()) << ','
                    << fmt5(e.at("ci_low").get<double>()) << ','
                    << fmt5(e.at("ci_high").get<double>()) << ','
                    << e.at("n").get<std::size_t>() << '\n';
    }
    write_file(reports / "consistency.csv", consistency.str());

    std::ostringstream agreement;
    agreement << "judge,run,baseline,rho,ci_low,ci_high,n\n";
    for (const auto& e : report.at("vs_baseline")) {
        agreement << e.at("judge").get<std::string>() << ',' << e.at("run").get<int>() << ','
                  << e.at("baseline").get<std::string>() << ',' << fmt5(e.at("rho").get<double>())
                  << ',' << fmt5(e.at("ci_low").get<double>()) << ','
                  << fmt5(e.at("ci_high").get<double>()) << ',' << e.at("n").get<std::size_t>()
                  << '\n';
    }
    write_file(reports / "agreement.csv", agreement.str());

    std::ostringstream auc;
    auc << "ranking,auc,ci_low,ci_high,n_positive,n_negative\n";
    if (report.at("auc").at("present").get<bool>()) {
        for (const auto& e : report.at("auc").at("entries")) {
            auc << e.at("ranking").get<std::string>() << ',' << fmt5(e.at("auc").get<double>())
                << ',' << fmt5(e.at("ci_low").get<double>()) << ','
                << fmt5(e.at("ci_high").get<double>()) << ','
                << e.at("n_positive").get<std::size_t>() << ','
                << e.at("n_negative").get<std::size_t>() << '\n';
        }
    }
    write_file(reports / "auc.csv", auc.str());

    std::ostringstream tiebreak;
    tiebreak << "baseline,variants,min_rho,ci_low,ci_high,lower_bound\n";
    for (const auto& e : report.at("tie_break")) {
        tiebreak << e.at("baseline").get<std::string>() << ',' << e.at("variants").get<std::size_t>()
                 << ',' << fmt5(e.at("min_rho").get<double>()) << ','
                 << fmt5(e.at("ci_low").get<double>()) << ',' << fmt5(e.at("ci_high").get<double>())
                 << ',' << fmt5(e.at("lower_bound").get<double>()) << '\n';
    }
    write_file(reports / "tiebreak.csv", tiebreak.str());

    // Wide summary: rows = cohort x criterion, columns = judge runs.
    std::ostringstream summary;
    summary << "cohort,criterion";
    for (const auto& r : rankings) {
        summary << ',' << r.judge_id << "#run" << r.pipeline_run_index;
    }
    summary << '\n';
    std::set<std::string> baseline_names;
    for (const auto& e : report.at("vs_baseline")) {
        baseline_names.insert(e.at("baseline").get<std::string>());
    }
    for (const auto& baseline : baseline_names) {
        summary << config.cohort_id << ",spearman-vs-" << baseline;
        for (const auto& r : rankings) {
            summary << ',';
            for (const auto& e : report.at("vs_baseline")) {
                if (e.at("judge") == r.judge_id && e.at("run") == r.pipeline_run_index &&
                    e.at("baseline") == baseline) {
                    summary << fmt5(e.at("rho").get<double>());
                    break;
                }
            }
        }
        summary << '\n';
    }
    if (report.at("auc").at("present").get<bool>()) {
        summary << config.cohort_id << ",auc";
        for (const auto& r : rankings) {
            const std::string name = r.judge_id + "/run" + std::to_string(r.pipeline_run_index);
            summary << ',';
            for (const auto& e : report.at("auc").at("entries")) {
                if (e.at("ranking") == name) {
                    summary << fmt5(e.at("auc").get<double>());
                    break;
                }
            }
        }
        summary << '\n';
    }
    summary << config.cohort_id << ",run-to-run-spearman";
    for (const auto& r : rankings) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (const auto& e : report.at("run_to_run")) {
            if (e.at("judge") != r.judge_id) continue;
            if (e.at("run_a") == r.pipeline_run_index || e.at("run_b") == r.pipeline_run_index) {
                acc += e.at("rho").get<double>();
                ++cnt;
            }
        }
        summary << ',';
        if (cnt > 0) summary << fmt5(acc / static_cast<double>(cnt));
        else summary << "NA";
    }
    summary << '\n';
    write_file(reports / "summary.csv", summary.str());

    for (std::size_t i = 0; i < models.size() && i < rankings.size(); ++i) {
        const std::string stem = rankings[i].judge_id + "_run" +
                                 std::to_string(rankings[i].pipeline_run_index);
        write_file(reports / ("attribution_" + stem + ".csv"), attribution_to_csv(models[i]));
    }
    write_file(reports / "attribution_overlap.json", report.at("attribution").dump(2) + "\n");
    write_file(reports / "ranking_report.json", report.dump(2) + "\n");
}

}  // namespace

// ---------------------------------------------------------------------------
// Experiment drivers
// ---------------------------------------------------------------------------

namespace {

struct HarnessContext {
    ExperimentConfig config;
    CohortDataset dataset;
    std::string hash;
    RunLedger ledger;
    LedgerState prior;
};

HarnessContext open_context(const ExperimentConfig& config) {
    config.validate();
    HarnessContext ctx{config,
                       load_cohort(config.cohort_path, config.cohort_id),
                       config_hash(config),
                       RunLedger::exists(config.output_dir)
                           ? RunLedger::open_append(config.output_dir)
                           : RunLedger::create(config.output_dir, config_hash(config),
                                               config.master_seed, canonical_config_json(config)),
                       LedgerState{}};
    if (ctx.ledger.config_hash() != ctx.hash) {
        throw std::runtime_error("config hash mismatch: ledger has " + ctx.ledger.config_hash() +
                                 ", config computes " + ctx.hash + "; refusing to continue");
    }
    ctx.prior = LedgerState::load(config.output_dir);

    const fs::path config_copy = fs::path(config.output_dir) / "config.json";
    if (!fs::exists(config_copy)) {
        write_file(config_copy, config_to_json(config).dump(2) + "\n");
    }
    return ctx;
}

struct PairwiseSlotResult {
    std::optional<JudgeVerdict> verdict;
    std::vector<TranscriptRecord> records;
    bool unresolved = false;
    bool cached = false;
    std::exception_ptr error;
};

ExperimentResult run_pairwise(HarnessContext& ctx, const HarnessOverrides* overrides) {
    const ExperimentConfig& config = ctx.config;
    const CohortDataset& dataset = ctx.dataset;
    const auto pairs = designated_pairs(config, dataset);

    for (const auto& [ia, ib] : pairs) {
        for (std::size_t idx : {ia, ib}) {
            if (!dataset.items[idx].risk.count(config.intensive_intervention)) {
                throw CohortError("item '" + dataset.items[idx].item_id +
                                  "' lacks a risk label for intervention '" +
                                  config.intensive_intervention + "'");
            }
        }
    }

    // Completed verdicts from a previous (interrupted) run.
    std::map<std::string, json> completed;
    for (const auto& rec : ctx.prior.records) {
        if (rec.kind != "verdict" || rec.payload.value("experiment", "") != "pairwise") continue;
        completed[rec.payload.at("slot_key").get<std::string>()] = rec.payload;
    }

    std::vector<json> verdict_records;
    std::size_t unresolved = 0;
    const std::size_t total_slots =
        config.judges.size() * config.conditions.size() * pairs.size() *
        static_cast<std::size_t>(config.runs_per_pair);

    for (const auto& judge_spec : config.judges) {
        JudgeBundle bundle;
        if (overrides && overrides->judges.count(judge_spec.name)) {
            bundle = overrides->judges.at(judge_spec.name);
        } else {
            bundle = make_judge_bundle(judge_spec, config,
                                       derive_seed(config.master_seed, "judge", judge_spec.name));
        }
        const std::uint64_t judge_seed = derive_seed(config.master_seed, "judge", judge_spec.name);

        for (const auto& condition : config.conditions) {
            const PromptSpec prompt = prompt_for(config, condition);
            const std::uint64_t cond_seed =
                derive_seed(judge_seed, "condition", to_string(condition));
            const std::size_t slots = pairs.size() * static_cast<std::size_t>(config.runs_per_pair);

            auto run_slot = [&](std::size_t slot) -> PairwiseSlotResult {
                PairwiseSlotResult out;
                const std::size_t pair_idx = slot / static_cast<std::size_t>(config.runs_per_pair);
                const int run = static_cast<int>(slot % static_cast<std::size_t>(config.runs_per_pair));
                const ItemProfile& first = dataset.items[pairs[pair_idx].first];
                const ItemProfile& second = dataset.items[pairs[pair_idx].second];
                const std::string slot_key = judge_spec.name + "|" + to_string(condition) + "|" +
                                             pair_key_of(first.item_id, second.item_id) + "|" +
                                             std::to_string(run);
                if (completed.count(slot_key)) {
                    out.cached = true;
                    return out;
                }
                const std::uint64_t slot_seed = derive_seed(
                    derive_seed(cond_seed, "pair", first.item_id, second.item_id), "run",
                    static_cast<std::uint64_t>(run));
                Rng present_rng(derive_seed(slot_seed, "presentation"));
                const bool swap = present_rng.bernoulli(0.5);
                const ItemProfile& left = swap ? second : first;
                const ItemProfile& right = swap ? first : second;
                MemoryTranscriptSink buffer;
                try {
                    out.verdict = elicit_comparison(*bundle.judge, left, right, prompt, run,
                                                    buffer, bundle.gateway, slot_seed);
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

            std::vector<PairwiseSlotResult> results =
                parallel_map_ordered<PairwiseSlotResult>(slots, bundle.max_concurrency, run_slot);

            LedgerTranscriptSink sink(ctx.ledger);
            for (std::size_t slot = 0; slot < slots; ++slot) {
                PairwiseSlotResult& s = results[slot];
                const std::size_t pair_idx = slot / static_cast<std::size_t>(config.runs_per_pair);
                const int run = static_cast<int>(slot % static_cast<std::size_t>(config.runs_per_pair));
                const ItemProfile& first = dataset.items[pairs[pair_idx].first];
                const ItemProfile& second = dataset.items[pairs[pair_idx].second];
                const std::string slot_key = judge_spec.name + "|" + to_string(condition) + "|" +
                                             pair_key_of(first.item_id, second.item_id) + "|" +
                                             std::to_string(run);
                if (s.cached) {
                    verdict_records.push_back(completed.at(slot_key));
                    continue;
                }
                std::string last_ref;
                for (const auto& rec : s.records) last_ref = sink.append(rec);
                if (s.error) std::rethrow_exception(s.error);
                if (s.unresolved) {
                    ++unresolved;
                    ctx.ledger.append("unresolved", json{{"experiment", "pairwise"},
                                                         {"slot_key", slot_key}});
                    if (static_cast<double>(unresolved) >
                        config.failure_budget * static_cast<double>(total_slots)) {
                        throw UnresolvedComparisonError(
                            "unresolved pairwise comparisons exceed the failure budget", {});
                    }
                    continue;
                }
                if (!last_ref.empty()) s.verdict->transcript_ref = last_ref;
                json payload{{"experiment", "pairwise"},
                             {"judge", judge_spec.name},
                             {"condition", to_string(condition)},
                             {"slot_key", slot_key},
                             {"verdict", verdict_to_json(*s.verdict)}};
                ctx.ledger.append("verdict", payload);
                verdict_records.push_back(std::move(payload));
            }
        }
    }

    json report = build_pairwise_report(config, dataset, verdict_records, unresolved);
    if (!ctx.prior.has_report) ctx.ledger.append("report", report);
    write_pairwise_files(config, report);
    return ExperimentResult{std::move(report), config.output_dir};
}

ExperimentResult run_ranking(HarnessContext& ctx, const HarnessOverrides* overrides) {
    const ExperimentConfig& config = ctx.config;
    const CohortDataset& dataset = ctx.dataset;
    const InfoCondition condition =
        config.conditions.empty() ? InfoCondition::no_prediction : config.conditions.front();

    // Prior state per (judge, run): pair list, completed verdicts, ranking.
    struct Prior {
        std::vector<PairIndex> pairs;
        std::map<std::string, JudgeVerdict> completed;
        std::optional<RankingResult> ranking;
    };
    std::map<std::string, std::size_t> item_index;
    for (std::size_t i = 0; i < dataset.items.size(); ++i) item_index[dataset.items[i].item_id] = i;

    std::map<std::string, Prior> prior;
    auto run_key = [](const std::string& judge, int run) {
        return judge + "#" + std::to_string(run);
    };
    for (const auto& rec : ctx.prior.records) {
        if (rec.kind == "pair_list") {
            Prior& p = prior[run_key(rec.payload.at("judge").get<std::string>(),
                                     rec.payload.at("run").get<int>())];
            p.pairs.clear();
            for (const auto& pr : rec.payload.at("pairs")) {
                const std::size_t a = item_index.at(pr.at(0).get<std::string>());
                const std::size_t b = item_index.at(pr.at(1).get<std::string>());
                p.pairs.push_back({std::min(a, b), std::max(a, b)});
            }
        } else if (rec.kind == "verdict" && rec.payload.value("experiment", "") == "ranking") {
            Prior& p = prior[run_key(rec.payload.at("judge").get<std::string>(),
                                     rec.payload.at("run").get<int>())];
            const JudgeVerdict v = verdict_from_json(rec.payload.at("verdict"));
            p.completed[comparison_key(v.left_id, v.right_id, v.run_index)] = v;
        } else if (rec.kind == "ranking") {
            Prior& p = prior[run_key(rec.payload.at("judge").get<std::string>(),
                                     rec.payload.at("run").get<int>())];
            p.ranking = ranking_from_json(rec.payload.at("ranking").dump());
        }
    }

    std::vector<RankingResult> rankings;
    for (const auto& judge_spec : config.judges) {
        JudgeBundle bundle;
        if (overrides && overrides->judges.count(judge_spec.name)) {
            bundle = overrides->judges.at(judge_spec.name);
        } else {
            bundle = make_judge_bundle(judge_spec, config,
                                       derive_seed(config.master_seed, "judge", judge_spec.name));
        }
        const std::uint64_t judge_seed = derive_seed(config.master_seed, "judge", judge_spec.name);

        for (int run = 0; run < config.pipeline_runs_per_judge; ++run) {
            const std::string key = run_key(judge_spec.name, run);
            const auto prior_it = prior.find(key);
            if (prior_it != prior.end() && prior_it->second.ranking.has_value()) {
                rankings.push_back(*prior_it->second.ranking);
                continue;
            }

            PipelineConfig pcfg;
            pcfg.pair_sampling_p = config.pair_sampling_p;
            pcfg.comparisons_per_pair = config.comparisons_per_pair;
            pcfg.epsilon = config.epsilon;
            pcfg.tol = config.tol;
            pcfg.max_iterations = config.max_iterations;
            pcfg.prompt = prompt_for(config, condition);
            pcfg.gateway = bundle.gateway;
            pcfg.max_concurrency = bundle.max_concurrency;
            pcfg.failure_budget = config.failure_budget;

            PipelineResume resume_state;
            const PipelineResume* resume_ptr = nullptr;
            if (prior_it != prior.end()) {
                resume_state.pairs = prior_it->second.pairs;
                resume_state.completed = prior_it->second.completed;
                resume_ptr = &resume_state;
            }

            const bool pairs_recorded = prior_it != prior.end() && !prior_it->second.pairs.empty();
            LedgerTranscriptSink sink(ctx.ledger);
            PipelineHooks hooks;
            hooks.on_pairs = [&](const std::vector<PairIndex>& pl) {
                if (pairs_recorded) return;
                json arr = json::array();
                for (const auto& pr : pl) {
                    arr.push_back(json::array(
                        {dataset.items[pr.a].item_id, dataset.items[pr.b].item_id}));
                }
                ctx.ledger.append("pair_list",
                                  json{{"judge", judge_spec.name}, {"run", run}, {"pairs", arr}});
            };
            hooks.on_verdict = [&](std::size_t, const JudgeVerdict& v) {
                if (resume_ptr &&
                    resume_ptr->completed.count(comparison_key(v.left_id, v.right_id, v.run_index))) {
                    return;  // already in the ledger
                }
                ctx.ledger.append("verdict", json{{"experiment", "ranking"},
                                                  {"judge", judge_spec.name},
                                                  {"run", run},
                                                  {"verdict", verdict_to_json(v)}});
            };
            hooks.on_ranking = [&](const RankingResult& r) {
                ctx.ledger.append("ranking",
                                  json{{"judge", judge_spec.name},
                                       {"run", run},
                                       {"ranking", json::parse(ranking_to_json(r))}});
            };

            const std::uint64_t run_seed = derive_seed(judge_seed, "pipeline-run",
                                                       static_cast<std::uint64_t>(run));
            PipelineOutcome outcome = run_ranking_pipeline(dataset, *bundle.judge, pcfg, run_seed,
                                                           run, sink, &hooks, resume_ptr);
            rankings.push_back(std::move(outcome.ranking));
        }
    }

    std::vector<AttributionModel> models;
    json report = build_ranking_report(config, dataset, rankings, &models);
    if (!ctx.prior.has_report) ctx.ledger.append("report", report);
    write_ranking_files(config, report, rankings, models);
    return ExperimentResult{std::move(report), config.output_dir};
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const HarnessOverrides* overrides) {
    HarnessContext ctx = open_context(config);
    if (config.experiment_kind == ExperimentKind::pairwise) return run_pairwise(ctx, overrides);
    return run_ranking(ctx, overrides);
}

ExperimentResult resume_experiment(const std::string& output_dir,
                                   const HarnessOverrides* overrides) {
    const fs::path config_path = fs::path(output_dir) / "config.json";
    if (!fs::exists(config_path)) {
        throw std::runtime_error("no config.json in '" + output_dir + "'; cannot resume");
    }
    ExperimentConfig config = load_config(config_path.string());
    if (config.output_dir != output_dir) {
        // The directory may have been relocated; trust its current location
        // only when the stored hash still matches (validated in open_context).
        config.output_dir = output_dir;
    }
    if (!RunLedger::exists(output_dir)) {
        throw std::runtime_error("no ledger in '" + output_dir + "'; nothing to resume");
    }
    const auto header = RunLedger::read_all(output_dir);
    nlohmann::json stored_json = header.front().payload;
    stored_json["output_dir"] = output_dir;
    ExperimentConfig stored = config_from_json(stored_json);
    if (config_hash(stored) != header.front().config_hash) {
        throw std::runtime_error("ledger header hash does not match its stored config");
    }
    return run_experiment(stored, overrides);
}

ExperimentResult analyze_ledger(const std::string& output_dir) {
    const fs::path config_path = fs::path(output_dir) / "config.json";
    if (!fs::exists(config_path)) {
        throw std::runtime_error("no config.json in '" + output_dir + "'");
    }
    const ExperimentConfig config = load_config(config_path.string());
    const CohortDataset dataset = load_cohort(config.cohort_path, config.cohort_id);
    const auto records = RunLedger::read_all(output_dir);

    json report;
    if (config.experiment_kind == ExperimentKind::ranking) {
        std::vector<RankingResult> rankings;
        for (const auto& rec : records) {
            if (rec.kind == "ranking") {
                rankings.push_back(ranking_from_json(rec.payload.at("ranking").dump()));
            }
        }
        std::vector<AttributionModel> models;
        report = build_ranking_report(config, dataset, rankings, &models);
        write_ranking_files(config, report, rankings, models);
    } else {
        std::vector<json> verdicts;
        std::set<std::string> unresolved_slots;
        for (const auto& rec : records) {
            if (rec.kind == "verdict" && rec.payload.value("experiment", "") == "pairwise") {
                verdicts.push_back(rec.payload);
            } else if (rec.kind == "unresolved") {
                unresolved_slots.insert(rec.payload.at("slot_key").get<std::string>());
            }
        }
        report = build_pairwise_report(config, dataset, verdicts, unresolved_slots.size());
        write_pairwise_files(config, report);
    }
    return ExperimentResult{std::move(report), output_dir};
}

}  // namespace rankaudit
