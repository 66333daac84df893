// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foresight/date.hpp"
#include "foresight/events.hpp"

namespace foresight {

/// One strategy's probability for one event at one prediction date.
struct ForecastRecord {
    std::string event_id;
    std::string strategy;
    Date prediction_date;
    double probability = 0.0;
    std::vector<double> samples;  // empty for external (e.g. market) forecasts
    std::optional<std::string> trace_ref;

    /// Throws InvalidForecast when probability leaves [0,1] or disagrees with
    /// the sample mean by more than 1e-9.
    void validate() const;
};

/// A forecast paired with its realised outcome (0 or 1).
struct ScoredPair {
    double probability;
    int outcome;
};

struct CategoryScore {
    std::size_t count = 0;
    double brier = 0.0;
};

struct ScoreReport {
    std::size_t n_total = 0;
    std::size_t n_yes = 0;
    std::size_t n_no = 0;
    double brier = 0.0;
    std::optional<double> brier_yes;
    std::optional<double> brier_no;
    std::optional<double> weighted_brier;
    std::map<Category, CategoryScore> per_category;
    double mean_prediction = 0.0;
};

/// Mean squared error between forecasts and outcomes. Throws EmptyInput.
double brier(std::span<const ScoredPair> pairs);

/// Mean of the Brier scores of the two outcome classes. Throws EmptyClass
/// naming the empty side ("yes" or "no").
double weighted_brier(std::span<const ScoredPair> yes_pairs, std::span<const ScoredPair> no_pairs);

/// Scores forecasts against the resolved events of `split`. Any forecast on an
/// unknown or unresolved event is an error.
ScoreReport score(std::span<const ForecastRecord> forecasts, const DatasetSplit& split);

/// Human-market forecasts for every resolved event active on `date`, using
/// the spread midpoint of that day's snapshot. Throws MissingSnapshot.
std::vector<ForecastRecord> market_forecasts(const DatasetSplit& split, Date date,
                                             const std::string& strategy = "human");

/// Sum of the mean forward probability and the mean probability of the
/// reversed (negated) events; a coherent forecaster gives 1.
double coherence_sum(double mean_forward, double mean_reversed);

struct ShiftRow {
    std::string event_id;
    double p_just;
    double p_rationale;
    double delta;  // p_rationale - p_just
};

struct EventProbability {
    std::string event_id;
    double probability;
};

/// Joins two per-event prediction lists on event_id (rows sorted by id).
/// Throws MismatchedEventSets listing ids present on one side only.
std::vector<ShiftRow> prediction_shift(std::span<const EventProbability> just_answer,
                                       std::span<const EventProbability> with_rationale);

// ---- forecast files ---------------------------------------------------------

std::string serialize_forecast(const ForecastRecord& r);
ForecastRecord parse_forecast(const std::string& line);
/// Line-delimited forecast file; MalformedRecord carries the line number.
std::vector<ForecastRecord> read_forecasts(std::istream& in);
std::vector<ForecastRecord> load_forecasts(const std::string& path);
void write_forecasts(std::ostream& out, std::span<const ForecastRecord> records);

// ---- rendering --------------------------------------------------------------

/// Fixed 4-decimal rendering with round-half-to-even on decimal ties
/// (0.17465 -> "0.1746").
std::string format4(double v);

/// Markdown table with one column per strategy (rows: Resolve Yes, Resolve
/// No, Weighted, Brier, Mean prediction, counts) followed by per-category rows.
std::string render_report_table(const std::vector<std::pair<std::string, ScoreReport>>& columns);

/// Structured (JSON) dump at full precision.
std::string render_report_json(const std::vector<std::pair<std::string, ScoreReport>>& columns);

}  // namespace foresight
