// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <string>

#include "foresight/llm/backend.hpp"
#include "foresight/llm/rate_limiter.hpp"

namespace foresight::llm {

struct HttpBackendConfig {
    std::string base_url;  // e.g. "https://api.example.com/v1"; "/chat/completions" is appended
    std::string api_key;
    std::string model;
    double requests_per_second = 1.0;
    int max_rate_limit_retries = 3;
    double max_retry_after_seconds = 60.0;
    std::chrono::seconds timeout{60};
    /// When false, or when the provider returns fewer choices than asked,
    /// remaining samples are fetched one call at a time.
    bool native_multi_sample = true;

    /// Reads FORESIGHT_LLM_BASE_URL and FORESIGHT_LLM_API_KEY.
    static HttpBackendConfig from_env(std::string model);
};

/// Chat-completions style HTTP JSON endpoint.
class HttpBackend final : public CompletionBackend {
  public:
    explicit HttpBackend(HttpBackendConfig config);

    [[nodiscard]] std::string id() const override;
    CompletionResponse complete(const CompletionRequest& req) override;

    /// Number of HTTP requests issued (including retries).
    [[nodiscard]] std::size_t provider_calls() const noexcept { return calls_.load(); }

  private:
    std::string post(const std::string& body);

    HttpBackendConfig config_;
    RateLimiter limiter_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace foresight::llm
