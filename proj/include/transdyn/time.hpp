#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace transdyn {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses an RFC3339 instant ("2016-03-01T09:00:00Z", "...+10:00", fractional
/// seconds truncated) or a plain integer count of epoch seconds.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp ts);

/// Hour of day in UTC, 0..23.
int utc_hour(Timestamp ts);

/// Half-open window [start, end) over hours of day; wraps past midnight when
/// start > end. start == end denotes the whole day.
struct HourWindow {
  int start = 21;
  int end = 6;

  bool contains(int hour) const {
    if (start == end) return true;
    if (start < end) return hour >= start && hour < end;
    return hour >= start || hour < end;
  }
  friend bool operator==(const HourWindow&, const HourWindow&) = default;
};

/// Parses "HH:HH" (e.g. "21:06").
std::optional<HourWindow> parse_hour_window(std::string_view text);

}  // namespace transdyn
