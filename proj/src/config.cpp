#include "rankaudit/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "rankaudit/btl.hpp"

namespace rankaudit {

using nlohmann::json;

std::string to_string(ExperimentKind k) {
    return k == ExperimentKind::pairwise ? "pairwise" : "ranking";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    if (s == "pairwise") return ExperimentKind::pairwise;
    if (s == "ranking") return ExperimentKind::ranking;
    throw std::invalid_argument("unknown experiment kind: " + s);
}

void ExperimentConfig::validate() const {
    if (cohort_path.empty()) throw std::invalid_argument("config: cohort_path is required");
    if (output_dir.empty()) throw std::invalid_argument("config: output_dir is required");
    if (judges.empty()) throw std::invalid_argument("config: at least one judge is required");
    if (runs_per_pair < 1) throw std::invalid_argument("config: runs_per_pair must be >= 1");
    if (!(pair_sampling_p > 0.0 && pair_sampling_p <= 1.0)) {
        throw std::invalid_argument("config: pair_sampling_p must be in (0,1]");
    }
    if (comparisons_per_pair < 1) {
        throw std::invalid_argument("config: comparisons_per_pair must be >= 1");
    }
    if (pipeline_runs_per_judge < 1) {
        throw std::invalid_argument("config: pipeline_runs_per_judge must be >= 1");
    }
    if (!(epsilon >= 0.0)) throw std::invalid_argument("config: epsilon must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("config: max_iterations must be >= 1");
    if (!(failure_budget >= 0.0 && failure_budget <= 1.0)) {
        throw std::invalid_argument("config: failure_budget must lie in [0,1]");
    }
    if (max_retries < 1) throw std::invalid_argument("config: max_retries must be >= 1");
    if (tie_break_variants < 2) throw std::invalid_argument("config: tie_break_variants must be >= 2");
    if (attribution_top_k < 1) throw std::invalid_argument("config: attribution_top_k must be >= 1");
    if (conditions.empty() && experiment_kind == ExperimentKind::pairwise) {
        throw std::invalid_argument("config: pairwise experiment needs at least one condition");
    }
    std::vector<std::string> names;
    for (const auto& js : judges) {
        if (js.name.empty()) throw std::invalid_argument("config: every judge needs a name");
        for (const auto& n : names) {
            if (n == js.name) throw std::invalid_argument("config: duplicate judge name " + js.name);
        }
        names.push_back(js.name);
        if (js.type == "endpoint") {
            js.endpoint.validate();
        } else if (js.type == "btl") {
            if (js.strengths.empty() && js.strengths_path.empty()) {
                throw std::invalid_argument("config: btl judge needs strengths or strengths_path");
            }
            if (!(js.clamp_lo >= 0.0 && js.clamp_lo <= js.clamp_hi && js.clamp_hi <= 1.0)) {
                throw std::invalid_argument("config: btl clamp must satisfy 0 <= lo <= hi <= 1");
            }
        } else if (js.type == "scripted") {
            if (js.responses.empty()) {
                throw std::invalid_argument("config: scripted judge needs responses");
            }
        } else if (js.type != "coin") {
            throw std::invalid_argument("config: unknown judge type '" + js.type + "'");
        }
    }
}

namespace {

JudgeEndpointConfig endpoint_from_json(const json& j) {
    JudgeEndpointConfig e;
    e.base_url = j.at("base_url").get<std::string>();
    e.model_name = j.at("model_name").get<std::string>();
    e.temperature = j.value("temperature", 0.0);
    e.max_retries = j.value("max_retries", 5);
    e.request_timeout_s = j.value("request_timeout_s", 60.0);
    e.max_concurrent_requests = j.value("max_concurrent_requests", 1);
    if (j.contains("distiller") && !j["distiller"].is_null()) {
        e.distiller = std::make_shared<JudgeEndpointConfig>(endpoint_from_json(j["distiller"]));
    }
    return e;
}

json endpoint_to_json(const JudgeEndpointConfig& e) {
    json j{{"base_url", e.base_url},
           {"model_name", e.model_name},
           {"temperature", e.temperature},
           {"max_retries", e.max_retries},
           {"request_timeout_s", e.request_timeout_s},
           {"max_concurrent_requests", e.max_concurrent_requests}};
    if (e.distiller) j["distiller"] = endpoint_to_json(*e.distiller);
    return j;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.experiment_kind = parse_experiment_kind(j.at("experiment_kind").get<std::string>());
    c.cohort_path = j.at("cohort_path").get<std::string>();
    c.cohort_id = j.value("cohort_id", std::string("cohort"));
    for (const auto& jj : j.at("judges")) {
        JudgeSpec spec;
        spec.name = jj.at("name").get<std::string>();
        spec.type = jj.at("type").get<std::string>();
        if (spec.type == "endpoint") {
            spec.endpoint = endpoint_from_json(jj);
        } else if (spec.type == "btl") {
            if (jj.contains("strengths")) {
                for (const auto& [k, v] : jj["strengths"].items()) {
                    spec.strengths[k] = v.get<double>();
                }
            }
            spec.strengths_path = jj.value("strengths_path", "");
            if (jj.contains("clamp")) {
                spec.clamp_lo = jj["clamp"].at(0).get<double>();
                spec.clamp_hi = jj["clamp"].at(1).get<double>();
            }
        } else if (spec.type == "scripted") {
            spec.responses = jj.at("responses").get<std::vector<std::string>>();
            spec.cycle = jj.value("cycle", true);
        }
        c.judges.push_back(std::move(spec));
    }
    if (j.contains("conditions")) {
        c.conditions.clear();
        for (const auto& s : j["conditions"]) {
            c.conditions.push_back(parse_condition(s.get<std::string>()));
        }
    }
    c.runs_per_pair = j.value("runs_per_pair", 10);
    c.pair_sampling_p = j.value("pair_sampling_p", 0.4);
    c.comparisons_per_pair = j.value("comparisons_per_pair", 1);
    c.pipeline_runs_per_judge = j.value("pipeline_runs_per_judge", 2);
    c.epsilon = j.value("epsilon", 1e-3);
    c.tol = j.value("tol", 1e-12);
    c.max_iterations = j.value("max_iterations", 100000);
    c.master_seed = j.value("master_seed", std::uint64_t{0});
    c.output_dir = j.at("output_dir").get<std::string>();
    c.prompt_template_path = j.value("prompt_template_path", "");
    c.intensive_intervention = j.value("intensive_intervention", std::string("TH"));
    c.failure_budget = j.value("failure_budget", 0.01);
    c.max_retries = j.value("max_retries", 5);
    c.max_concurrency = j.value("max_concurrency", 1);
    c.tie_break_variants = j.value("tie_break_variants", 10);
    c.attribution_top_k = j.value("attribution_top_k", 5);
    c.attribution_l2 = j.value("attribution_l2", 1.0);
    c.confidence_level = j.value("confidence_level", 0.95);
    if (j.contains("pairs")) {
        for (const auto& p : j["pairs"]) {
            c.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        }
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json judges = json::array();
    for (const auto& js : c.judges) {
        json jj{{"name", js.name}, {"type", js.type}};
        if (js.type == "endpoint") {
            json e = endpoint_to_json(js.endpoint);
            jj.update(e);
        } else if (js.type == "btl") {
            if (!js.strengths.empty()) {
                json s = json::object();
                for (const auto& [k, v] : js.strengths) s[k] = v;
                jj["strengths"] = std::move(s);
            }
            if (!js.strengths_path.empty()) jj["strengths_path"] = js.strengths_path;
            jj["clamp"] = json::array({js.clamp_lo, js.clamp_hi});
        } else if (js.type == "scripted") {
            jj["responses"] = js.responses;
            jj["cycle"] = js.cycle;
        }
        judges.push_back(std::move(jj));
    }
    json conditions = json::array();
    for (const auto& cond : c.conditions) conditions.push_back(to_string(cond));
    return json{{"experiment_kind", to_string(c.experiment_kind)},
                {"cohort_path", c.cohort_path},
                {"cohort_id", c.cohort_id},
                {"judges", std::move(judges)},
                {"conditions", std::move(conditions)},
                {"runs_per_pair", c.runs_per_pair},
                {"pair_sampling_p", c.pair_sampling_p},
                {"comparisons_per_pair", c.comparisons_per_pair},
                {"pipeline_runs_per_judge", c.pipeline_runs_per_judge},
                {"epsilon", c.epsilon},
                {"tol", c.tol},
                {"max_iterations", c.max_iterations},
                {"master_seed", c.master_seed},
                {"output_dir", c.output_dir},
                {"prompt_template_path", c.prompt_template_path},
                {"intensive_intervention", c.intensive_intervention},
                {"failure_budget", c.failure_budget},
                {"max_retries", c.max_retries},
                {"max_concurrency", c.max_concurrency},
                {"tie_break_variants", c.tie_break_variants},
                {"attribution_top_k", c.attribution_top_k},
                {"attribution_l2", c.attribution_l2},
                {"confidence_level", c.confidence_level},
                {"pairs", [&] {
                     json arr = json::array();
                     for (const auto& [a, b] : c.pairs) arr.push_back(json::array({a, b}));
                     return arr;
                 }()}};
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    return config_from_json(j);
}

nlohmann::json canonical_config_json(const ExperimentConfig& config) {
    // output_dir does not affect results; keeping it out of the canonical
    // form lets identical experiments in different directories share a hash
    // and byte-identical ledgers.
    json j = config_to_json(config);
    j.erase("output_dir");
    return j;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canonical = canonical_config_json(config).dump();
    const std::uint64_t h = detail::fnv1a64(canonical);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

JudgeBundle make_judge_bundle(const JudgeSpec& spec, const ExperimentConfig& config,
                              std::uint64_t judge_seed) {
    JudgeBundle bundle;
    bundle.gateway.max_retries = config.max_retries;
    bundle.max_concurrency = config.max_concurrency;

    if (spec.type == "endpoint") {
        const char* token_env = std::getenv(kApiTokenEnvVar);
        const std::string token = token_env ? token_env : "";
        bundle.judge = std::make_shared<HttpJudge>(spec.name, spec.endpoint, token);
        bundle.gateway.max_retries = spec.endpoint.max_retries;
        bundle.max_concurrency = spec.endpoint.max_concurrent_requests;
        if (spec.endpoint.distiller) {
            bundle.distiller =
                std::make_shared<HttpJudge>(spec.name + "-distiller", *spec.endpoint.distiller, token);
            bundle.gateway.distiller = bundle.distiller.get();
        }
    } else if (spec.type == "btl") {
        BtlOracle oracle;
        oracle.seed = judge_seed;
        if (!spec.strengths_path.empty()) {
            std::ifstream in(spec.strengths_path);
            if (!in) throw std::runtime_error("cannot open strengths file: " + spec.strengths_path);
            json j;
            in >> j;
            for (const auto& [k, v] : j.items()) oracle.strengths[k] = v.get<double>();
        }
        for (const auto& [k, v] : spec.strengths) oracle.strengths[k] = v;
        bundle.judge = std::make_shared<BtlJudge>(spec.name, std::move(oracle), spec.clamp_lo,
                                                  spec.clamp_hi);
    } else if (spec.type == "scripted") {
        bundle.judge = ScriptedJudge::from_responses(spec.name, spec.responses, spec.cycle);
    } else if (spec.type == "coin") {
        bundle.judge = std::make_shared<CoinJudge>(spec.name, judge_seed);
    } else {
        throw std::invalid_argument("unknown judge type '" + spec.type + "'");
    }
    return bundle;
}

}  // namespace rankaudit
