#include "smas/analytics/day_grid.hpp"

#include <cmath>
#include <limits>

namespace smas::analytics {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

DayValues nan_day() {
  DayValues d;
  d.fill(kNaN);
  return d;
}

bool is_complete(const DayValues& day) {
  for (double v : day) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DayGrid make_day_grid(const core::MeterSeries& series) {
  DayGrid grid;
  grid.meter_id = series.meter_id;
  if (series.size() == 0) return grid;
  grid.first_day = date_of(series.start);
  const Date last = date_of(series.end() - std::chrono::seconds{1});
  const auto n_days = static_cast<std::size_t>((last - grid.first_day).count() + 1);
  grid.load.assign(n_days, nan_day());
  grid.temperature.assign(n_days, nan_day());
  const auto offset = static_cast<std::size_t>(hour_of_day(series.start));
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t k = offset + i;
    const std::size_t d = k / kHoursPerDay;
    const std::size_t h = k % kHoursPerDay;
    const bool gap = i < series.gap_mask.size() && series.gap_mask[i];
    grid.load[d][h] = gap ? kNaN : series.consumption[i];
    grid.temperature[d][h] = series.temperature[i];
  }
  return grid;
}

}  // namespace smas::analytics
