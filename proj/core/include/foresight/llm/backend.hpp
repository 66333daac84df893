// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace foresight::llm {

inline constexpr double kDefaultTemperature = 0.01;
inline constexpr int kDefaultSamples = 8;
inline constexpr int kDefaultMaxTokens = 1024;

struct CompletionRequest {
    std::string prompt;
    double temperature = kDefaultTemperature;
    int n_samples = kDefaultSamples;
    int max_tokens = kDefaultMaxTokens;
    std::optional<std::vector<std::string>> stop;

    /// Throws InvalidRequest on n_samples < 1, max_tokens < 1 or negative temperature.
    void validate() const;
};

struct CompletionResponse {
    std::vector<std::string> texts;
    std::string backend_id;
    bool cached = false;
};

/// A text-completion provider. Implementations must tolerate concurrent
/// `complete` calls.
class CompletionBackend {
  public:
    virtual ~CompletionBackend() = default;

    /// Stable identity used in cache keys; two backends with the same id must
    /// answer identical requests identically (modulo sampling noise).
    [[nodiscard]] virtual std::string id() const = 0;

    virtual CompletionResponse complete(const CompletionRequest& req) = 0;
};

/// Validates the request, calls the backend and checks that exactly
/// `n_samples` texts came back.
CompletionResponse complete(CompletionBackend& backend, const CompletionRequest& req);

}  // namespace foresight::llm
