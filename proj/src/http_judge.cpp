#include "rankaudit/http_judge.hpp"

#include <cmath>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace rankaudit {

using nlohmann::json;

void JudgeEndpointConfig::validate() const {
    if (base_url.empty()) throw std::invalid_argument("endpoint base_url is empty");
    if (model_name.empty()) throw std::invalid_argument("endpoint model_name is empty");
    if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be >= 0");
    if (max_retries < 1) throw std::invalid_argument("max_retries must be >= 1");
    if (max_concurrent_requests < 1) {
        throw std::invalid_argument("max_concurrent_requests must be >= 1");
    }
    if (!(request_timeout_s > 0.0)) throw std::invalid_argument("request_timeout must be > 0");
    if (distiller) distiller->validate();
}

HttpJudge::HttpJudge(std::string judge_id, JudgeEndpointConfig config, std::string api_token)
    : id_(std::move(judge_id)), config_(std::move(config)), api_token_(std::move(api_token)) {
    config_.validate();
}

std::string HttpJudge::respond(const PromptContext& ctx) {
    httplib::Client client(config_.base_url);
    const auto timeout_s = static_cast<time_t>(config_.request_timeout_s);
    const auto timeout_us =
        static_cast<time_t>(std::fmod(config_.request_timeout_s, 1.0) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);
    if (!api_token_.empty()) {
        client.set_default_headers({{"Authorization", "Bearer " + api_token_}});
    }

    json body;
    body["model"] = config_.model_name;
    body["temperature"] = config_.temperature;
    json messages = json::array();
    for (const auto& m : ctx.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = std::move(messages);

    httplib::Result res = client.Post("/v1/chat/completions", body.dump(), "application/json");
    if (!res) {
        throw EndpointError("endpoint '" + config_.base_url +
                            "' unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw EndpointError("endpoint '" + config_.base_url + "' returned status " +
                            std::to_string(res->status));
    }
    try {
        const json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw EndpointError(std::string("malformed endpoint response: ") + e.what());
    }
}

}  // namespace rankaudit
