#include "rankaudit/ledger.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace rankaudit {

using nlohmann::json;
namespace fs = std::filesystem;

std::string RunLedger::ledger_path(const std::string& dir) {
    return (fs::path(dir) / "ledger" / "ledger.jsonl").string();
}

bool RunLedger::exists(const std::string& dir) {
    return fs::exists(ledger_path(dir));
}

RunLedger RunLedger::create(const std::string& dir, const std::string& config_hash,
                            std::uint64_t master_seed, const json& header_payload) {
    const std::string path = ledger_path(dir);
    fs::create_directories(fs::path(path).parent_path());
    if (fs::exists(path) && fs::file_size(path) > 0) {
        throw std::runtime_error("ledger already exists: " + path);
    }
    RunLedger ledger;
    ledger.path_ = path;
    ledger.config_hash_ = config_hash;
    ledger.master_seed_ = master_seed;
    ledger.out_ = std::make_unique<std::ofstream>(path, std::ios::app);
    if (!*ledger.out_) throw std::runtime_error("cannot open ledger for writing: " + path);
    ledger.append("run_header", header_payload);
    return ledger;
}

RunLedger RunLedger::open_append(const std::string& dir) {
    const auto records = read_all(dir);
    if (records.empty() || records.front().kind != "run_header") {
        throw std::runtime_error("ledger in '" + dir + "' has no run_header");
    }
    RunLedger ledger;
    ledger.path_ = ledger_path(dir);
    ledger.config_hash_ = records.front().config_hash;
    ledger.master_seed_ = records.front().master_seed;
    ledger.next_seq_ = records.back().seq + 1;
    ledger.out_ = std::make_unique<std::ofstream>(ledger.path_, std::ios::app);
    if (!*ledger.out_) throw std::runtime_error("cannot open ledger for appending: " + ledger.path_);
    return ledger;
}

std::uint64_t RunLedger::append(const std::string& kind, json payload) {
    std::lock_guard<std::mutex> lock(*mutex_);
    const std::uint64_t seq = next_seq_++;
    json line{{"seq", seq},
              {"kind", kind},
              {"config_hash", config_hash_},
              {"master_seed", master_seed_},
              {"payload", std::move(payload)}};
    *out_ << line.dump() << '\n';
    out_->flush();
    if (!*out_) throw std::runtime_error("ledger write failed: " + path_);
    return seq;
}

std::vector<LedgerRecord> RunLedger::read_all(const std::string& dir) {
    const std::string path = ledger_path(dir);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ledger: " + path);
    std::vector<LedgerRecord> records;
    std::string line;
    std::uint64_t last_seq = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("ledger line " + std::to_string(line_no) +
                                     " is malformed: " + e.what());
        }
        LedgerRecord rec;
        rec.seq = j.at("seq").get<std::uint64_t>();
        rec.kind = j.at("kind").get<std::string>();
        rec.config_hash = j.value("config_hash", "");
        rec.master_seed = j.value("master_seed", std::uint64_t{0});
        rec.payload = j.at("payload");
        if (rec.seq <= last_seq) {
            throw std::runtime_error("ledger sequence numbers are not strictly increasing at line " +
                                     std::to_string(line_no));
        }
        last_seq = rec.seq;
        records.push_back(std::move(rec));
    }
    return records;
}

json transcript_to_json(const TranscriptRecord& rec) {
    json messages = json::array();
    for (const auto& m : rec.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    json j{{"judge_id", rec.judge_id},
           {"left_id", rec.left_id},
           {"right_id", rec.right_id},
           {"condition", to_string(rec.condition)},
           {"run_index", rec.run_index},
           {"attempt", rec.attempt},
           {"messages", std::move(messages)},
           {"response", rec.response},
           {"resolved", rec.resolved}};
    if (!rec.distill_messages.empty()) {
        json dm = json::array();
        for (const auto& m : rec.distill_messages) {
            dm.push_back({{"role", m.role}, {"content", m.content}});
        }
        j["distill_messages"] = std::move(dm);
        j["distill_response"] = rec.distill_response;
    }
    return j;
}

std::string LedgerTranscriptSink::append(const TranscriptRecord& rec) {
    const std::uint64_t seq = ledger_.append("transcript", transcript_to_json(rec));
    return "ledger:" + std::to_string(seq);
}

json verdict_to_json(const JudgeVerdict& v) {
    return json{{"left_id", v.left_id},
                {"right_id", v.right_id},
                {"winner_id", v.winner_id},
                {"condition", to_string(v.condition)},
                {"run_index", v.run_index},
                {"transcript_ref", v.transcript_ref},
                {"retries", v.retries},
                {"distilled", v.distilled}};
}

JudgeVerdict verdict_from_json(const json& j) {
    JudgeVerdict v;
    v.left_id = j.at("left_id").get<std::string>();
    v.right_id = j.at("right_id").get<std::string>();
    v.winner_id = j.at("winner_id").get<std::string>();
    v.condition = parse_condition(j.at("condition").get<std::string>());
    v.run_index = j.at("run_index").get<int>();
    v.transcript_ref = j.at("transcript_ref").get<std::string>();
    v.retries = j.at("retries").get<int>();
    v.distilled = j.at("distilled").get<bool>();
    return v;
}

}  // namespace rankaudit
