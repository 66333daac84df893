// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "foresight/llm/backend.hpp"

namespace foresight::llm {

/// One scripted reply rule. Rules are evaluated in order; the first match wins.
///
/// Sample i of a request receives `responses[i % responses.size()]`, so a
/// rule with eight responses scripts all eight samples of one call. Regex
/// rules may reference capture groups in their responses as `{{0}}`, `{{1}}`...
/// A rule with `error` set throws BackendUnavailable instead of replying.
struct MockRule {
    enum class Match { Substring, Regex, Any };

    Match match = Match::Any;
    std::string pattern;
    std::vector<std::string> responses;
    std::optional<std::string> error;
};

/// Deterministic offline backend driven by MockRules. Stateless per call, so
/// results do not depend on call order or concurrency.
class ScriptedBackend final : public CompletionBackend {
  public:
    explicit ScriptedBackend(std::vector<MockRule> rules, std::string id = "scripted");

    /// Loads a rules document: `{"id": "...", "rules": [{"match": "contains" |
    /// "regex" | "any", "pattern": "...", "responses": [...] | "response": "...",
    /// "error": "..."}]}`. The backend id defaults to "scripted:" plus a digest
    /// of the document so cached replies never outlive a script edit.
    static std::unique_ptr<ScriptedBackend> from_json(const std::string& document);
    static std::unique_ptr<ScriptedBackend> from_file(const std::string& path);

    [[nodiscard]] std::string id() const override { return id_; }
    CompletionResponse complete(const CompletionRequest& req) override;

    /// Number of `complete` calls served so far.
    [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }

  private:
    struct CompiledRule {
        MockRule rule;
        std::optional<std::regex> re;
    };

    std::vector<CompiledRule> rules_;
    std::string id_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace foresight::llm
