// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "foresight/date.hpp"

namespace foresight {

enum class Category { Covid19, Finance, TechIndustry, Misc };
enum class Resolution { Yes, No, Unresolved };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

/// One binary market question.
struct Event {
    std::string id;
    std::string name;
    std::string condition;
    std::string description;
    Category category = Category::Misc;
    Date created;
    Date expires;
    std::optional<Date> resolved_at;
    Resolution resolution = Resolution::Unresolved;

    [[nodiscard]] bool resolved() const { return resolution != Resolution::Unresolved; }
};

/// Human prediction-market spread for an event on one day.
struct MarketSnapshot {
    std::string event_id;
    Date date;
    double lower = 0.0;
    double upper = 0.0;
};

struct SplitLabel {
    enum class Kind { Val, Test, Custom };
    Kind kind = Kind::Custom;
    std::string name;  // only meaningful for Custom

    static SplitLabel val() { return {Kind::Val, "val"}; }
    static SplitLabel test() { return {Kind::Test, "test"}; }
    static SplitLabel custom(std::string n) { return {Kind::Custom, std::move(n)}; }
};

struct DatasetSplit {
    SplitLabel label;
    std::vector<Event> events;
    std::vector<MarketSnapshot> snapshots;

    [[nodiscard]] const Event* find(std::string_view id) const;
    [[nodiscard]] const MarketSnapshot* snapshot_for(std::string_view event_id, Date date) const;
};

enum class DatasetFormat { JsonLines };

/// Parses line-delimited event records. The whole input is rejected on the
/// first malformed line (MalformedRecord carries the 1-based line number) or
/// on a repeated id (DuplicateId). Blank lines are ignored.
DatasetSplit parse_dataset(std::istream& in, DatasetFormat format = DatasetFormat::JsonLines,
                           SplitLabel label = SplitLabel::custom("dataset"));
DatasetSplit load_dataset(const std::string& path, SplitLabel label = SplitLabel::custom("dataset"));

/// Canonical single-line form of one event with its snapshots (no trailing newline).
std::string serialize_event(const Event& e, const std::vector<MarketSnapshot>& market);
/// Canonical form of a whole split, one line per event, each terminated by '\n'.
std::string serialize_dataset(const DatasetSplit& split);

/// Events with created <= on, expires > on and not yet resolved on `on`
/// (a resolution dated `on` counts as resolved). Input order is kept.
std::vector<Event> active_events(const DatasetSplit& split, Date on);

/// Midpoint of the market spread.
double market_point_prediction(const MarketSnapshot& s);

/// 1 for Yes, 0 for No; throws UnresolvedEvent otherwise.
int outcome_indicator(const Event& e);

}  // namespace foresight
