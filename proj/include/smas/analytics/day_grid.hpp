#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "smas/core/types.hpp"
#include "smas/time.hpp"

namespace smas::analytics {

/// One value per hour of a UTC day; NaN marks a missing hour.
using DayValues = std::array<double, kHoursPerDay>;

[[nodiscard]] DayValues nan_day();
[[nodiscard]] bool is_complete(const DayValues& day);

/// A meter series rearranged as days x hours. Hours flagged as gaps are NaN in
/// `load` even when the store interpolated a value for them.
struct DayGrid {
  std::string meter_id;
  Date first_day{};
  std::vector<DayValues> load;
  std::vector<DayValues> temperature;

  [[nodiscard]] std::size_t days() const noexcept { return load.size(); }
  [[nodiscard]] Date day(std::size_t i) const { return first_day + std::chrono::days{static_cast<long>(i)}; }
};

[[nodiscard]] DayGrid make_day_grid(const core::MeterSeries& series);

}  // namespace smas::analytics
