#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankaudit/harness.hpp"
#include "rankaudit/kernels.hpp"
#include "rankaudit/ledger.hpp"
#include "rankaudit/synth.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

rankaudit::SyntheticCohortSpec spec_from_json(const json& j) {
    rankaudit::SyntheticCohortSpec spec;
    spec.n_items = j.value("n_items", spec.n_items);
    spec.n_questions = j.value("n_questions", spec.n_questions);
    spec.answers_per_question = j.value("answers_per_question", spec.answers_per_question);
    if (j.contains("strength_distribution")) {
        spec.strength_distribution =
            rankaudit::parse_strength_distribution(j["strength_distribution"].get<std::string>());
    }
    spec.strength_lo = j.value("strength_lo", spec.strength_lo);
    spec.strength_hi = j.value("strength_hi", spec.strength_hi);
    spec.ladder_ratio = j.value("ladder_ratio", spec.ladder_ratio);
    if (j.contains("planted_features")) {
        for (const auto& pf : j["planted_features"]) {
            spec.planted_features.push_back({pf.at("question_id").get<std::string>(),
                                             pf.at("answer").get<std::string>(),
                                             pf.at("weight").get<double>()});
        }
    }
    spec.label_noise = j.value("label_noise", spec.label_noise);
    spec.label_top_quantile = j.value("label_top_quantile", spec.label_top_quantile);
    spec.label_sharpness = j.value("label_sharpness", spec.label_sharpness);
    spec.baseline_tie_quantum = j.value("baseline_tie_quantum", spec.baseline_tie_quantum);
    spec.seed = j.value("seed", spec.seed);
    return spec;
}

int run_synth(const std::string& spec_path, const std::string& out_dir) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot open spec file: " + spec_path);
    json j;
    in >> j;
    const auto spec = spec_from_json(j);
    const rankaudit::SyntheticCohort cohort = rankaudit::gen_cohort(spec);

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    rankaudit::save_cohort(cohort.dataset, (dir / "cohort.jsonl").string());

    json strengths = json::object();
    for (const auto& [id, theta] : cohort.oracle.strengths) strengths[id] = theta;
    std::ofstream strengths_out(dir / "strengths.json");
    strengths_out << strengths.dump(2) << '\n';

    std::cout << "wrote " << (dir / "cohort.jsonl").string() << " (" << cohort.dataset.items.size()
              << " items) and strengths.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pairwise-comparison ranking and judge-audit toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string ledger_dir;
    std::string spec_path;
    std::string out_dir = "synthetic";

    auto* run_pairwise = app.add_subcommand("run-pairwise", "Run the pairwise-comparison study");
    run_pairwise->add_option("--config", config_path, "Experiment config JSON")->required();

    auto* run_ranking = app.add_subcommand("run-ranking", "Run the ranking consistency audit");
    run_ranking->add_option("--config", config_path, "Experiment config JSON")->required();

    auto* resume = app.add_subcommand("resume", "Resume an interrupted run from its output directory");
    resume->add_option("--ledger", ledger_dir, "Output directory holding the run ledger")->required();

    auto* analyze = app.add_subcommand("analyze", "Recompute reports from a run ledger");
    analyze->add_option("--ledger", ledger_dir, "Output directory holding the run ledger")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic cohort with known ground truth");
    synth->add_option("--spec", spec_path, "Synthetic cohort spec JSON")->required();
    synth->add_option("--out", out_dir, "Output directory (default: synthetic)");

    auto* info = app.add_subcommand("info", "Print build and kernel backend information");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_pairwise->parsed() || run_ranking->parsed()) {
            rankaudit::ExperimentConfig config = rankaudit::load_config(config_path);
            const auto expected = run_pairwise->parsed() ? rankaudit::ExperimentKind::pairwise
                                                         : rankaudit::ExperimentKind::ranking;
            if (config.experiment_kind != expected) {
                std::cerr << "config experiment_kind is '" << to_string(config.experiment_kind)
                          << "' but the subcommand expects '" << to_string(expected) << "'\n";
                return 2;
            }
            const auto result = rankaudit::run_experiment(config);
            std::cout << "reports written under " << result.output_dir << "/reports\n";
            return 0;
        }
        if (resume->parsed()) {
            const auto result = rankaudit::resume_experiment(ledger_dir);
            std::cout << "resumed; reports written under " << result.output_dir << "/reports\n";
            return 0;
        }
        if (analyze->parsed()) {
            const auto result = rankaudit::analyze_ledger(ledger_dir);
            std::cout << "reports recomputed under " << result.output_dir << "/reports\n";
            return 0;
        }
        if (synth->parsed()) {
            return run_synth(spec_path, out_dir);
        }
        if (info->parsed()) {
            std::cout << "kernel backend: " << rankaudit::kernels::backend_name() << '\n';
            std::cout << "api token env var: " << rankaudit::kApiTokenEnvVar << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
