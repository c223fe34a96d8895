#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "smas/time.hpp"

namespace smas::workflow {

enum class Interval { once, minutely, hourly, daily, weekly, monthly };

[[nodiscard]] std::string_view to_string(Interval interval) noexcept;
/// Throws Error(invalid_argument) listing the accepted names.
[[nodiscard]] Interval parse_interval(std::string_view text);

enum class ScheduleKind { deterministic, queued };

[[nodiscard]] std::string_view to_string(ScheduleKind kind) noexcept;
[[nodiscard]] ScheduleKind parse_schedule_kind(std::string_view text);

/**
 * @brief When a workflow becomes due.
 *
 * Occurrences are `anchor + k * interval` for k >= 0; monthly occurrences add
 * k calendar months to the anchor, clamping the day to the month's length.
 * Deterministic workflows start at their occurrence; queued workflows join the
 * FIFO queue of their cluster class at their occurrence.
 */
struct Schedule {
  ScheduleKind kind = ScheduleKind::deterministic;
  Interval interval = Interval::daily;
  Timestamp anchor{};
  std::string cluster_class = "default";

  static Schedule deterministic(Interval interval, Timestamp anchor) {
    return Schedule{ScheduleKind::deterministic, interval, anchor, "default"};
  }
  static Schedule queued(Interval interval, Timestamp anchor, std::string cluster_class = "default") {
    return Schedule{ScheduleKind::queued, interval, anchor, std::move(cluster_class)};
  }
};

/// k-th occurrence of the schedule.
[[nodiscard]] Timestamp occurrence(const Schedule& schedule, long k);

/// First occurrence at or after `t`; none once a one-shot anchor has passed.
[[nodiscard]] std::optional<Timestamp> next_occurrence_at_or_after(const Schedule& schedule, Timestamp t);
/// First occurrence strictly after `t`.
[[nodiscard]] std::optional<Timestamp> next_occurrence_after(const Schedule& schedule, Timestamp t);

}  // namespace smas::workflow
