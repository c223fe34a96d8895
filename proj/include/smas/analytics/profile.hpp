#pragma once

#include <set>
#include <span>
#include <string>

#include "smas/analytics/day_grid.hpp"

namespace smas::analytics {

/// Days treated like weekends when profiling.
struct Calendar {
  std::set<Date> holidays;

  [[nodiscard]] bool is_weekend_like(Date d) const { return is_weekend(d) || holidays.contains(d); }
};

struct DailyProfile {
  std::string meter_id;
  DayValues weekday{};
  DayValues weekend{};
  /// A class is unavailable when some hour has no value in it; its array is then all zero.
  bool weekday_available = false;
  bool weekend_available = false;
};

/// Per-hour means of temperature-independent load, split into weekdays and
/// weekend days (holidays included). `loads[i]` belongs to `start + i` hours;
/// NaN values are skipped. Needs at least 7 days (168 hours) of input.
[[nodiscard]] DailyProfile daily_profile(Timestamp start, std::span<const double> loads, const Calendar& calendar = {},
                                         std::string meter_id = {});

}  // namespace smas::analytics
