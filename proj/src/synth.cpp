#include "rankaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rankaudit {

StrengthDistribution parse_strength_distribution(const std::string& s) {
    if (s == "log-uniform") return StrengthDistribution::log_uniform;
    if (s == "geometric-ladder") return StrengthDistribution::geometric_ladder;
    if (s == "constant") return StrengthDistribution::constant;
    throw std::invalid_argument("unknown strength distribution: " + s);
}

std::string to_string(StrengthDistribution d) {
    switch (d) {
        case StrengthDistribution::log_uniform: return "log-uniform";
        case StrengthDistribution::geometric_ladder: return "geometric-ladder";
        case StrengthDistribution::constant: return "constant";
    }
    return "constant";
}

void SyntheticCohortSpec::validate() const {
    if (n_items < 2) throw std::invalid_argument("synthetic cohort needs at least 2 items");
    if (n_questions < 1) throw std::invalid_argument("need at least one question");
    if (answers_per_question < 2) throw std::invalid_argument("need at least 2 answers per question");
    if (!(label_noise >= 0.0 && label_noise <= 1.0)) {
        throw std::invalid_argument("label_noise must lie in [0,1]");
    }
    if (!(label_top_quantile > 0.0 && label_top_quantile < 1.0)) {
        throw std::invalid_argument("label_top_quantile must lie in (0,1)");
    }
    if (strength_distribution == StrengthDistribution::log_uniform &&
        !(strength_lo > 0.0 && strength_hi >= strength_lo)) {
        throw std::invalid_argument("log-uniform bounds must satisfy 0 < lo <= hi");
    }
    if (strength_distribution == StrengthDistribution::geometric_ladder && !(ladder_ratio > 0.0)) {
        throw std::invalid_argument("ladder ratio must be positive");
    }
    for (const auto& pf : planted_features) {
        if (pf.question_id.empty() || pf.answer.empty()) {
            throw std::invalid_argument("planted feature needs question_id and answer");
        }
    }
}

namespace {

std::string padded_id(const char* prefix, std::size_t index, std::size_t total) {
    std::size_t width = 1;
    for (std::size_t t = total; t >= 10; t /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    while (digits.size() < width) digits.insert(digits.begin(), '0');
    return std::string(prefix) + digits;
}

}  // namespace

SyntheticCohort gen_cohort(const SyntheticCohortSpec& spec) {
    spec.validate();
    Rng answers_rng(derive_seed(spec.seed, "answers"));
    Rng strength_rng(derive_seed(spec.seed, "strengths"));
    Rng label_rng(derive_seed(spec.seed, "labels"));

    std::vector<std::string> question_ids(spec.n_questions);
    for (std::size_t q = 0; q < spec.n_questions; ++q) {
        question_ids[q] = padded_id("q", q, spec.n_questions);
    }
    std::vector<std::string> answer_vocab(spec.answers_per_question);
    for (std::size_t a = 0; a < spec.answers_per_question; ++a) {
        answer_vocab[a] = padded_id("a", a, spec.answers_per_question);
    }
    for (const auto& pf : spec.planted_features) {
        if (std::find(question_ids.begin(), question_ids.end(), pf.question_id) ==
            question_ids.end()) {
            throw std::invalid_argument("planted feature names unknown question '" +
                                        pf.question_id + "'");
        }
        if (std::find(answer_vocab.begin(), answer_vocab.end(), pf.answer) == answer_vocab.end()) {
            throw std::invalid_argument("planted feature names unknown answer '" + pf.answer + "'");
        }
    }

    SyntheticCohort out;
    out.dataset.cohort_id = "synthetic";
    out.dataset.schema = question_ids;
    out.oracle.seed = derive_seed(spec.seed, "oracle");

    std::vector<double> log_theta(spec.n_items, 0.0);
    for (std::size_t i = 0; i < spec.n_items; ++i) {
        ItemProfile item;
        item.item_id = padded_id("item-", i, spec.n_items);
        item.cohort = Cohort::synthetic;

        double planted_sum = 0.0;
        for (std::size_t q = 0; q < spec.n_questions; ++q) {
            QuestionAnswer qa;
            qa.question_id = question_ids[q];
            qa.question_text = "Synthetic question " + question_ids[q];
            qa.answer = answer_vocab[answers_rng.next_below(spec.answers_per_question)];
            for (const auto& pf : spec.planted_features) {
                if (pf.question_id == qa.question_id && pf.answer == qa.answer) {
                    planted_sum += pf.weight;
                }
            }
            item.answers.push_back(std::move(qa));
        }

        double base = 1.0;
        switch (spec.strength_distribution) {
            case StrengthDistribution::log_uniform:
                base = strength_rng.log_uniform(spec.strength_lo, spec.strength_hi);
                break;
            case StrengthDistribution::geometric_ladder:
                base = std::pow(spec.ladder_ratio, static_cast<double>(i));
                break;
            case StrengthDistribution::constant:
                base = 1.0;
                break;
        }
        log_theta[i] = std::log(base) + planted_sum;
        out.dataset.items.push_back(std::move(item));
    }

    // Strengths, baseline scores, risk tertiles.
    std::vector<std::size_t> by_strength(spec.n_items);
    std::iota(by_strength.begin(), by_strength.end(), 0);
    std::sort(by_strength.begin(), by_strength.end(), [&](std::size_t a, std::size_t b) {
        if (log_theta[a] != log_theta[b]) return log_theta[a] < log_theta[b];
        return out.dataset.items[a].item_id < out.dataset.items[b].item_id;
    });
    std::vector<std::size_t> ascending_rank(spec.n_items, 0);
    for (std::size_t pos = 0; pos < by_strength.size(); ++pos) ascending_rank[by_strength[pos]] = pos;

    out.baseline_scores.resize(spec.n_items);
    out.service_labels.resize(spec.n_items);
    const std::size_t n_positive = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(spec.label_top_quantile *
                                                 static_cast<double>(spec.n_items))));
    for (std::size_t i = 0; i < spec.n_items; ++i) {
        ItemProfile& item = out.dataset.items[i];
        const double theta = std::exp(log_theta[i]);
        out.oracle.strengths[item.item_id] = theta;

        double baseline = log_theta[i];
        if (spec.baseline_tie_quantum > 0.0) {
            baseline = std::floor(baseline / spec.baseline_tie_quantum) * spec.baseline_tie_quantum;
        }
        out.baseline_scores[i] = baseline;
        item.baseline_scores["baseline"] = baseline;

        const double r_norm = spec.n_items > 1
                                  ? static_cast<double>(ascending_rank[i]) /
                                        static_cast<double>(spec.n_items - 1)
                                  : 0.0;
        bool positive;
        if (spec.label_sharpness > 0.0) {
            const double t = spec.label_sharpness * (r_norm - (1.0 - spec.label_top_quantile));
            positive = label_rng.bernoulli(1.0 / (1.0 + std::exp(-t)));
        } else {
            positive = ascending_rank[i] + n_positive >= spec.n_items;
        }
        if (spec.label_noise > 0.0 && label_rng.bernoulli(spec.label_noise)) positive = !positive;
        out.service_labels[i] = positive;
        item.received_intensive_service = positive;

        // Risk tertiles under the intensive intervention: stronger items are
        // the more vulnerable ones and carry higher reentry risk.
        const std::size_t tertile = ascending_rank[i] * 3 / spec.n_items;
        item.risk["TH"] = tertile == 2 ? RiskLevel::high
                                       : (tertile == 1 ? RiskLevel::medium : RiskLevel::low);
    }

    out.oracle.validate();
    validate_dataset(out.dataset);
    return out;
}

std::vector<double> gen_tied_scores(std::size_t n, const std::vector<std::size_t>& tie_groups,
                                    Rng& rng) {
    std::size_t tied_total = 0;
    for (std::size_t g : tie_groups) {
        if (g < 2) throw std::invalid_argument("tie groups must have size >= 2");
        tied_total += g;
    }
    if (tied_total > n) throw std::invalid_argument("tie groups exceed the vector length");

    std::vector<double> values;
    values.reserve(n);
    double next_value = 0.0;
    for (std::size_t g = 0; g < tie_groups.size(); ++g) {
        for (std::size_t t = 0; t < tie_groups[g]; ++t) values.push_back(next_value);
        next_value += 1.0;
    }
    while (values.size() < n) {
        values.push_back(next_value);
        next_value += 1.0;
    }
    rng.shuffle(values);
    return values;
}

}  // namespace rankaudit
