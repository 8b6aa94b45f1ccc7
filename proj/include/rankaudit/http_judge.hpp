#pragma once

#include <memory>
#include <string>

#include "rankaudit/judge.hpp"

namespace rankaudit {

// Remote chat-completion endpoint. The distiller, when present, is a second
// endpoint used to reduce verbose replies to a single household token.
struct JudgeEndpointConfig {
    std::string base_url;  // e.g. "http://localhost:8000"
    std::string model_name;
    double temperature = 0.0;
    int max_retries = 5;
    double request_timeout_s = 60.0;
    int max_concurrent_requests = 1;
    std::shared_ptr<JudgeEndpointConfig> distiller;

    void validate() const;
};

// POSTs {model, messages, temperature} to <base_url>/v1/chat/completions and
// returns the first choice's message content. Timeouts and non-2xx statuses
// surface as EndpointError. The bearer token is never logged.
class HttpJudge : public Judge {
public:
    HttpJudge(std::string judge_id, JudgeEndpointConfig config, std::string api_token = "");

    std::string id() const override { return id_; }
    std::string respond(const PromptContext& ctx) override;

    const JudgeEndpointConfig& config() const { return config_; }

private:
    std::string id_;
    JudgeEndpointConfig config_;
    std::string api_token_;
};

// Name of the environment variable read for the endpoint credential.
inline constexpr const char* kApiTokenEnvVar = "RANKAUDIT_API_TOKEN";

}  // namespace rankaudit
