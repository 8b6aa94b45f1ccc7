#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankaudit/gateway.hpp"

namespace rankaudit {

struct LedgerRecord {
    std::uint64_t seq = 0;
    std::string kind;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    nlohmann::json payload;
};

// Append-only JSONL run ledger. Records are never mutated; sequence numbers
// are strictly increasing; appends are serialized through one writer.
class RunLedger {
public:
    // Creates <dir>/ledger.jsonl (fails if records already exist) and writes
    // the run_header record.
    static RunLedger create(const std::string& dir, const std::string& config_hash,
                            std::uint64_t master_seed, const nlohmann::json& header_payload);

    // Opens an existing ledger for appending; validates monotone sequence.
    static RunLedger open_append(const std::string& dir);

    std::uint64_t append(const std::string& kind, nlohmann::json payload);

    const std::string& config_hash() const { return config_hash_; }
    std::uint64_t master_seed() const { return master_seed_; }
    const std::string& path() const { return path_; }

    static std::string ledger_path(const std::string& dir);
    static bool exists(const std::string& dir);
    static std::vector<LedgerRecord> read_all(const std::string& dir);

    RunLedger(RunLedger&&) = default;
    RunLedger& operator=(RunLedger&&) = default;

private:
    RunLedger() = default;
    std::string path_;
    std::string config_hash_;
    std::uint64_t master_seed_ = 0;
    std::uint64_t next_seq_ = 1;
    std::unique_ptr<std::ofstream> out_;
    std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

// TranscriptSink over a ledger: each record becomes one "transcript" line and
// the returned ref ("ledger:<seq>") resolves to it.
class LedgerTranscriptSink : public TranscriptSink {
public:
    explicit LedgerTranscriptSink(RunLedger& ledger) : ledger_(ledger) {}
    std::string append(const TranscriptRecord& rec) override;

private:
    RunLedger& ledger_;
};

nlohmann::json transcript_to_json(const TranscriptRecord& rec);
nlohmann::json verdict_to_json(const JudgeVerdict& v);
JudgeVerdict verdict_from_json(const nlohmann::json& j);

}  // namespace rankaudit
