#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankaudit/condition.hpp"
#include "rankaudit/core.hpp"
#include "rankaudit/judge.hpp"

namespace rankaudit {

inline constexpr const char* kPromptPlaceholder = "{{household_data}}";

// Base prompt with one placeholder region the pair block is substituted into.
struct PromptSpec {
    std::string template_text;
    std::string system_preamble;
    InfoCondition condition = InfoCondition::no_prediction;

    // Throws unless the template contains the placeholder exactly once.
    void validate() const;
};

// Built-in reconstruction of the allocation-task prompt; override with
// load_prompt_spec when the exact production wording is available.
PromptSpec default_prompt_spec(InfoCondition condition);

// Reads {"system_preamble": ..., "template": ...} from a JSON file.
PromptSpec load_prompt_spec(const std::string& path, InfoCondition condition);

// One adjudicated comparison. left/right are the presentation order actually
// shown to the judge (left = Household A).
struct JudgeVerdict {
    std::string left_id;
    std::string right_id;
    std::string winner_id;
    InfoCondition condition = InfoCondition::no_prediction;
    int run_index = 0;
    std::string transcript_ref;
    int retries = 0;
    bool distilled = false;
};

enum class Orientation { outcome, vulnerability, indeterminate };

inline std::string to_string(Orientation o) {
    switch (o) {
        case Orientation::outcome: return "outcome";
        case Orientation::vulnerability: return "vulnerability";
        case Orientation::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

// Full raw record of one attempt, including any distillation exchange.
struct TranscriptRecord {
    std::string judge_id;
    std::string left_id;
    std::string right_id;
    InfoCondition condition = InfoCondition::no_prediction;
    int run_index = 0;
    int attempt = 0;
    std::vector<Message> messages;
    std::string response;
    std::vector<Message> distill_messages;
    std::string distill_response;
    bool resolved = false;
};

class TranscriptSink {
public:
    virtual ~TranscriptSink() = default;
    // Persists the record and returns an opaque ref that resolves to it.
    virtual std::string append(const TranscriptRecord& rec) = 0;
};

class MemoryTranscriptSink : public TranscriptSink {
public:
    std::string append(const TranscriptRecord& rec) override {
        records.push_back(rec);
        return "mem:" + std::to_string(records.size() - 1);
    }
    std::vector<TranscriptRecord> records;
};

// Raised when a comparison stays unresolved after every allowed attempt.
class UnresolvedComparisonError : public std::runtime_error {
public:
    UnresolvedComparisonError(const std::string& what, std::vector<TranscriptRecord> t)
        : std::runtime_error(what), transcripts(std::move(t)) {}
    std::vector<TranscriptRecord> transcripts;
};

struct GatewayOptions {
    int max_retries = 5;          // total attempts allowed
    Judge* distiller = nullptr;   // optional fallback for verbose replies
};

struct DistillResult {
    std::optional<std::string> winner;
    std::vector<Message> messages;
    std::string response;
};

// Asks the distiller to reduce a verbose reply to a single household token;
// the result is re-validated by parse_verdict.
DistillResult distill_verdict(const std::string& response_text, const std::string& left_id,
                              const std::string& right_id, Judge& distiller, std::uint64_t seed);

// Runs the full strict-parse / distill / re-prompt escalation for one pair in
// presentation order. Every attempt's transcript reaches `sink` before the
// call returns, including on failure. Throws UnresolvedComparisonError after
// max_retries failed attempts and EndpointError on transport failure.
JudgeVerdict elicit_comparison(Judge& judge, const ItemProfile& left, const ItemProfile& right,
                               const PromptSpec& spec, int run_index, TranscriptSink& sink,
                               const GatewayOptions& options, std::uint64_t seed);

// Orientation of one verdict given both items' risk under the intensive
// intervention: favoring the lower-risk household is outcome-oriented.
Orientation classify_orientation(const JudgeVerdict& verdict, RiskLevel left_risk,
                                 RiskLevel right_risk);

// The pair block substituted into the prompt placeholder.
std::string compose_pair_block(const ItemProfile& left, const ItemProfile& right,
                               InfoCondition condition);

}  // namespace rankaudit
