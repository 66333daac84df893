// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "foresight/date.hpp"
#include "foresight/events.hpp"
#include "foresight/llm/backend.hpp"

namespace foresight {

/// Scale the template asked the model to answer in. Governs how a bare
/// number above 1 (no `%`) is read by parse_probability.
enum class AnswerScale { None, Unit, Percent };

using Bindings = std::map<std::string, std::string, std::less<>>;

/// A prompt body with `[placeholder]` slots. Only declared placeholders are
/// substituted; other bracketed text (few-shot markers such as `[EVENT]`) is
/// literal.
struct PromptTemplate {
    std::string id;  // "<strategy>/<step>"
    std::string body;
    std::vector<std::string> placeholders;
    AnswerScale answer_scale = AnswerScale::None;
};

/// Single-pass substitution; substituted text is never rescanned. Throws
/// UnboundPlaceholder when a declared placeholder has no binding.
std::string render(const PromptTemplate& tpl, const Bindings& bindings);

/// Templates loaded from `<dir>/<strategy>/<step>.txt` plus the `<step>.json`
/// sidecar (`{"placeholders": [...], "answer_scale": "percent"|"unit"|"none"}`).
/// The shared `[Forecaster Text]` slot is bound from `common/forecaster_text`.
class TemplateRegistry {
  public:
    static TemplateRegistry load(const std::filesystem::path& dir);

    /// FORESIGHT_TEMPLATE_DIR when set, else the directory compiled in at build time.
    static std::filesystem::path default_dir();

    [[nodiscard]] const PromptTemplate& get(std::string_view id) const;
    [[nodiscard]] bool contains(std::string_view id) const;
    [[nodiscard]] std::vector<std::string> ids() const;

    /// Renders with the shared bindings added (caller bindings take precedence).
    [[nodiscard]] std::string render(std::string_view id, const Bindings& bindings) const;

    [[nodiscard]] const Bindings& shared_bindings() const noexcept { return shared_; }

  private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
    Bindings shared_;
};

/// Exact calendar-day difference; throws NegativeWindow when today > expiry.
std::int64_t days_remaining(Date today, Date expiry);

/// Event + prediction date + strategy-specific slots.
class RenderContext {
  public:
    /// Throws PreconditionError unless today < event.expires.
    RenderContext(Event event, Date today, Bindings extra = {});

    [[nodiscard]] const Event& event() const noexcept { return event_; }
    [[nodiscard]] Date today() const noexcept { return today_; }
    [[nodiscard]] const Bindings& extra() const noexcept { return extra_; }

    /// name, condition, expiry, today, number of days, description, then extra.
    [[nodiscard]] Bindings bindings() const;

  private:
    Event event_;
    Date today_;
    Bindings extra_;
};

std::string render(const PromptTemplate& tpl, const RenderContext& ctx);

/// Deterministic probability reader. Candidates are numbers followed directly
/// by `%` (value/100) and bare numbers in [0,1]; with AnswerScale::Percent a
/// bare number in (1,100] is also read as a percentage. Numbers glued to
/// letters, dates, ranges or thousands separators are ignored. The last
/// candidate wins. Throws NoProbabilityFound.
double parse_probability(std::string_view text, AnswerScale scale = AnswerScale::Unit);
std::optional<double> try_parse_probability(std::string_view text, AnswerScale scale = AnswerScale::Unit);

struct Extraction {
    double probability = 0.0;
    std::string extractor_reply;
    bool used_fallback = false;  // the extractor reply was unusable; raw output parsed directly
};

/// Asks `extractor` to restate `raw_output` as a bare probability and parses
/// its reply on the unit scale, falling back to parsing `raw_output` itself on
/// `scale`. Throws
/// ExtractionFailed when neither yields a value; backend errors propagate.
Extraction extract_probability(llm::CompletionBackend& extractor, const TemplateRegistry& templates,
                               const std::string& raw_output, AnswerScale scale);

/// Arithmetic mean; throws EmptyInput.
double aggregate_probabilities(std::span<const double> values);

}  // namespace foresight
