#include "smas/analytics/profile.hpp"

#include <cmath>

#include "smas/error.hpp"

namespace smas::analytics {

DailyProfile daily_profile(Timestamp start, std::span<const double> loads, const Calendar& calendar,
                           std::string meter_id) {
  if (loads.size() < 7 * static_cast<std::size_t>(kHoursPerDay)) {
    throw Error(ErrorCode::insufficient_data, "daily profile needs at least 7 days of loads");
  }
  std::array<double, kHoursPerDay> sum_wd{}, sum_we{};
  std::array<std::size_t, kHoursPerDay> n_wd{}, n_we{};
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const double v = loads[i];
    if (!std::isfinite(v)) continue;
    const Timestamp t = start + static_cast<long>(i) * kHour;
    const auto h = static_cast<std::size_t>(hour_of_day(t));
    if (calendar.is_weekend_like(date_of(t))) {
      sum_we[h] += v;
      ++n_we[h];
    } else {
      sum_wd[h] += v;
      ++n_wd[h];
    }
  }
  DailyProfile p;
  p.meter_id = std::move(meter_id);
  p.weekday_available = p.weekend_available = true;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    p.weekday_available = p.weekday_available && n_wd[h] > 0;
    p.weekend_available = p.weekend_available && n_we[h] > 0;
  }
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    p.weekday[h] = p.weekday_available ? sum_wd[h] / static_cast<double>(n_wd[h]) : 0.0;
    p.weekend[h] = p.weekend_available ? sum_we[h] / static_cast<double>(n_we[h]) : 0.0;
  }
  return p;
}

}  // namespace smas::analytics
