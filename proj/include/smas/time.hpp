#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace smas {

/// UTC instant with one-second resolution. Readings are always hour aligned.
using Timestamp = std::chrono::sys_seconds;
/// UTC calendar day.
using Date = std::chrono::sys_days;

inline constexpr std::chrono::seconds kHour{3600};
inline constexpr std::chrono::seconds kDay{86400};
inline constexpr int kHoursPerDay = 24;

[[nodiscard]] inline Timestamp from_unix(std::int64_t seconds) { return Timestamp{std::chrono::seconds{seconds}}; }
[[nodiscard]] inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

[[nodiscard]] inline bool is_hour_aligned(Timestamp t) {
  return t.time_since_epoch().count() % kHour.count() == 0;
}

[[nodiscard]] inline Date date_of(Timestamp t) { return std::chrono::floor<std::chrono::days>(t); }
[[nodiscard]] inline Timestamp start_of(Date d) { return Timestamp{d}; }

/// Hour of day in 0..23 (the PARX season index).
[[nodiscard]] inline int hour_of_day(Timestamp t) {
  return static_cast<int>((t - start_of(date_of(t))) / kHour);
}

[[nodiscard]] inline bool is_weekend(Date d) {
  const std::chrono::weekday wd{d};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

/// Whole hours from `from` to `to` (may be negative).
[[nodiscard]] inline std::int64_t hours_between(Timestamp from, Timestamp to) { return (to - from) / kHour; }

/// Parses `YYYY-MM-DDTHH:MM:SSZ`. A space may replace `T`, the trailing `Z`
/// and the seconds field are optional. Throws Error(parse) on malformed input;
/// alignment is not checked here.
[[nodiscard]] Timestamp parse_timestamp(std::string_view text);
/// Parses `YYYY-MM-DD`.
[[nodiscard]] Date parse_date(std::string_view text);

[[nodiscard]] std::string format_timestamp(Timestamp t);
[[nodiscard]] std::string format_date(Date d);

}  // namespace smas
