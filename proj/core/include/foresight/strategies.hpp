// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "foresight/date.hpp"
#include "foresight/error.hpp"
#include "foresight/events.hpp"
#include "foresight/llm/backend.hpp"
#include "foresight/metrics.hpp"
#include "foresight/news.hpp"
#include "foresight/prompts.hpp"

namespace foresight {

enum class StrategyId { Basic, Forecaster, BaseRate, BothSides, Sequences, Crowd, News, Reversed, BasicWithRationale };

std::string_view to_string(StrategyId id) noexcept;
std::optional<StrategyId> parse_strategy_id(std::string_view text);
const std::vector<StrategyId>& all_strategies();

/// Intermediate value produced by a step.
using Parsed = std::variant<std::monostate, std::string, std::vector<std::string>, double>;

/// How one sampled reply became a probability.
struct SampleExtraction {
    std::string extractor_reply;
    std::optional<double> probability;
    bool used_fallback = false;
    std::string error;  // set when no probability could be read
};

struct StepRecord {
    std::string step_id;
    std::string template_id;  // empty for non-LLM steps
    Bindings bindings;        // the template's own slots; shared slots are re-added on render
    std::string prompt;
    double temperature = llm::kDefaultTemperature;
    int n_samples = 0;
    std::vector<std::string> responses;
    Parsed parsed;
    std::vector<SampleExtraction> extractions;
    std::vector<std::string> warnings;

    [[nodiscard]] bool is_llm() const noexcept { return !template_id.empty(); }
};

struct ChainTrace {
    std::string event_id;
    std::string strategy;
    Date prediction_date;
    std::vector<StepRecord> steps;
    std::vector<double> final_samples;
    double final_probability = 0.0;
    std::optional<double> raw_probability;  // reversed: the uncomplemented basic result
};

/// Raised when a step of a chain fails. The partial trace holds every step
/// completed before the failure; `kind()` is the kind of the underlying error.
class ChainError : public Error {
  public:
    ChainError(std::string event_id, ChainTrace partial, const Error& cause);
    ChainError(std::string event_id, ChainTrace partial, std::string kind, const std::string& message);

    [[nodiscard]] const std::string& event_id() const noexcept { return event_id_; }
    [[nodiscard]] const ChainTrace& partial_trace() const noexcept { return partial_; }

  private:
    std::string event_id_;
    ChainTrace partial_;
};

struct ChainOptions {
    int final_samples = llm::kDefaultSamples;
    int intermediate_samples = 1;
    double temperature = llm::kDefaultTemperature;
    int persona_count = 8;
    int keyword_count = 3;
    int max_results = 25;
};

/// A strategy id plus its parameters. Known keys: samples, temperature (all
/// strategies), persona_count (crowd), keyword_count and max_results (news).
struct StrategySpec {
    StrategyId id = StrategyId::Basic;
    std::map<std::string, std::string> parameters;

    /// Throws ConfigError on an unknown id, an unknown key or a bad value.
    static StrategySpec parse(std::string_view id, const std::map<std::string, std::string>& parameters = {});

    [[nodiscard]] ChainOptions options() const;
};

/// What a chain needs besides the event. `extractor` defaults to `backend`;
/// the news clients are only used by the news strategy and may be null, in
/// which case that source contributes no headlines.
struct StrategyEnv {
    llm::CompletionBackend& backend;
    const TemplateRegistry& templates;
    llm::CompletionBackend* extractor = nullptr;
    news::HeadlineClient* hackernews = nullptr;
    news::HeadlineClient* nyt = nullptr;
};

ChainTrace run_basic(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_forecaster(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_base_rate(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_both_sides(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_sequences(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_crowd(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_news(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_reversed(const StrategyEnv& env, const Event& event, Date today, const ChainOptions& opts = {});
ChainTrace run_basic_with_rationale(const StrategyEnv& env, const Event& event, Date today,
                                    const ChainOptions& opts = {});

ChainTrace run_strategy(const StrategyEnv& env, const StrategySpec& spec, const Event& event, Date today);

/// Blocks delimited by `marker` up to the next marker or a line reading END.
/// Returns nullopt when the marker never occurs.
std::optional<std::vector<std::string>> parse_sequence_blocks(std::string_view text, std::string_view marker);

/// Text after `[OPPOSITE]` up to `[END]` or the end of the line, trimmed. A
/// reply without the marker contributes its first line.
std::string parse_opposite(std::string_view text);

/// Lines starting with `*`, stripped, at most `limit`.
std::vector<std::string> parse_keywords(std::string_view text, int limit);

/// First line of a persona reply, trimmed, trailing period removed.
std::string parse_job(std::string_view text);

/// Re-renders an LLM step from its recorded template and bindings.
std::string rerender(const TemplateRegistry& templates, const StepRecord& step);

ForecastRecord to_forecast(const ChainTrace& trace, std::optional<std::string> trace_ref = std::nullopt);

nlohmann::ordered_json trace_to_json(const ChainTrace& trace);
ChainTrace trace_from_json(const nlohmann::json& j);

/// `<dir>/<strategy>/<event id with unsafe characters replaced>.json`.
std::filesystem::path trace_path(const std::filesystem::path& dir, const ChainTrace& trace);

/// Writes the trace document and returns its path.
std::filesystem::path write_trace(const std::filesystem::path& dir, const ChainTrace& trace);

}  // namespace foresight
