// Copyright 2026 The Foresight Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace foresight {

/// A calendar date with no time-of-day component.
class Date {
  public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

    /// Parses strict ISO-8601 `YYYY-MM-DD`; returns nullopt on any deviation
    /// (wrong width, non-digits, impossible day such as 2022-02-30).
    static std::optional<Date> parse(std::string_view text);

    /// As `parse` but throws std::invalid_argument.
    static Date from_iso(std::string_view text);

    [[nodiscard]] std::string iso() const;

    [[nodiscard]] constexpr std::chrono::sys_days sys_days() const { return days_; }
    [[nodiscard]] constexpr std::int64_t day_number() const { return days_.time_since_epoch().count(); }

    [[nodiscard]] constexpr Date plus_days(std::int64_t n) const { return Date{days_ + std::chrono::days{n}}; }

    /// Seconds since the Unix epoch at 00:00:00 UTC of this date.
    [[nodiscard]] constexpr std::int64_t epoch_seconds() const { return day_number() * 86400; }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

  private:
    std::chrono::sys_days days_{};
};

/// Whole calendar days from `from` to `to` (negative when `to` precedes `from`).
constexpr std::int64_t days_between(Date from, Date to) { return to.day_number() - from.day_number(); }

}  // namespace foresight
