// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#include "foresight/llm/http_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "foresight/error.hpp"
#include "http_util.hpp"

namespace foresight::llm {

using nlohmann::json;

HttpBackendConfig HttpBackendConfig::from_env(std::string model) {
    HttpBackendConfig c;
    if (const char* url = std::getenv("FORESIGHT_LLM_BASE_URL")) c.base_url = url;
    if (const char* key = std::getenv("FORESIGHT_LLM_API_KEY")) c.api_key = key;
    c.model = std::move(model);
    return c;
}

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)), limiter_(config_.requests_per_second) {}

std::string HttpBackend::id() const { return "chat:" + config_.model + "@" + config_.base_url; }

std::string HttpBackend::post(const std::string& body) {
    if (config_.base_url.empty()) throw BackendUnavailable("no LLM base URL configured (FORESIGHT_LLM_BASE_URL)");
    const auto url = detail::split_url(config_.base_url);
    const std::string path = url.path + "/chat/completions";

    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    for (int attempt = 0;; ++attempt) {
        limiter_.acquire();
        calls_.fetch_add(1);
        httplib::Client client(url.origin);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) throw BackendUnavailable("LLM endpoint unreachable: " + httplib::to_string(res.error()));

        if (res->status == 429) {
            double retry_after = 1.0;
            if (res->has_header("Retry-After")) {
                try {
                    retry_after = std::stod(res->get_header_value("Retry-After"));
                } catch (const std::exception&) {
                }
            }
            if (attempt >= config_.max_rate_limit_retries) throw RateLimited(retry_after);
            const double wait = std::clamp(retry_after, 0.0, config_.max_retry_after_seconds);
            std::this_thread::sleep_for(std::chrono::duration<double>(wait));
            continue;
        }
        if (res->status < 200 || res->status >= 300) throw ProviderError(res->status, res->body);
        return res->body;
    }
}

CompletionResponse HttpBackend::complete(const CompletionRequest& req) {
    req.validate();
    CompletionResponse resp;
    resp.backend_id = id();
    bool native = config_.native_multi_sample;

    while (resp.texts.size() < static_cast<std::size_t>(req.n_samples)) {
        const int remaining = req.n_samples - static_cast<int>(resp.texts.size());
        json body;
        body["model"] = config_.model;
        body["messages"] = json::array({{{"role", "user"}, {"content", req.prompt}}});
        body["temperature"] = req.temperature;
        body["max_tokens"] = req.max_tokens;
        if (native && remaining > 1) body["n"] = remaining;
        if (req.stop) body["stop"] = *req.stop;

        const std::string raw = post(body.dump());
        json parsed;
        try {
            parsed = json::parse(raw);
        } catch (const json::parse_error&) {
            throw ProviderError(200, "unparseable provider reply: " + raw.substr(0, 200));
        }
        const auto choices = parsed.find("choices");
        if (choices == parsed.end() || !choices->is_array() || choices->empty())
            throw ProviderError(200, "provider reply has no choices");

        std::size_t got = 0;
        for (const auto& choice : *choices) {
            if (resp.texts.size() >= static_cast<std::size_t>(req.n_samples)) break;
            std::string text;
            if (choice.contains("message") && choice["message"].contains("content") &&
                choice["message"]["content"].is_string()) {
                text = choice["message"]["content"].get<std::string>();
            } else if (choice.contains("text") && choice["text"].is_string()) {
                text = choice["text"].get<std::string>();
            } else {
                throw ProviderError(200, "provider choice has no text");
            }
            resp.texts.push_back(std::move(text));
            ++got;
        }
        if (native && got < static_cast<std::size_t>(remaining)) native = false;  // provider ignores `n`
    }
    return resp;
}

}  // namespace foresight::llm
