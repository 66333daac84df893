// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foresight/date.hpp"
#include "foresight/llm/backend.hpp"
#include "foresight/news.hpp"

namespace foresight::cli {

/// Exit statuses shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

struct RunConfig {
    std::filesystem::path events;
    Date date;
    std::string strategy = "basic";
    std::map<std::string, std::string> parameters;
    std::string backend = "live";  // "live" or "mock:<rules file>"
    std::string model = "default";
    std::optional<std::filesystem::path> cache;
    bool replay_only = false;
    std::filesystem::path out;
    std::optional<std::filesystem::path> traces;  // default: <out dir>/traces
    int workers = 4;
    std::string hn_endpoint;
    std::string nyt_endpoint;
    std::optional<std::filesystem::path> templates;
};

struct RunResult {
    int exit_code = kExitOk;
    std::size_t forecasts = 0;
    std::size_t failures = 0;
    std::size_t backend_calls = 0;  // calls that reached the innermost LLM backend
    std::size_t news_calls = 0;     // HTTP requests issued by the news clients
};

/// Forecasts every active event and writes the forecast file plus one trace
/// per event. Throws ConfigError on invalid configuration.
RunResult cmd_run(const RunConfig& cfg, std::ostream& log);

struct ScoreConfig {
    std::filesystem::path events;
    std::optional<std::filesystem::path> forecasts;
    std::optional<Date> from_market;
    std::optional<std::filesystem::path> report;  // structured dump
};

/// Prints the markdown report, one column per strategy in the input.
int cmd_score(const ScoreConfig& cfg, std::ostream& out);

struct BiasConfig {
    std::filesystem::path forward;
    std::filesystem::path reversed;  // forecasts already complemented (1 - p on the reworded event)
    std::optional<std::filesystem::path> events;
};

struct BiasReport {
    std::size_t n = 0;
    double mean_forward = 0.0;
    double mean_one_minus_reversed = 0.0;
    double coherence = 0.0;
    std::optional<double> brier_forward;
    std::optional<double> brier_reversed;
};

BiasReport compute_bias(const BiasConfig& cfg);
std::string render_bias(const BiasReport& report);
int cmd_bias(const BiasConfig& cfg, std::ostream& out);

struct RationaleConfig {
    std::filesystem::path just;
    std::filesystem::path rationale;
};

/// Tab-separated `event_id p_just p_rationale delta` rows followed by `#`
/// summary lines with the three means.
int cmd_rationale(const RationaleConfig& cfg, std::ostream& out);

/// Parses argv and dispatches; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace foresight::cli
