#pragma once

#include <vector>

#include "smas/analytics/parx.hpp"
#include "smas/core/store.hpp"

namespace smas::analytics {

/// Hourly split of observed load into a temperature-driven part and the rest.
struct Disaggregation {
  std::string meter_id;
  Timestamp start{};
  std::vector<double> temp_independent;  ///< NaN where unavailable
  std::vector<double> temp_dependent;    ///< NaN where unavailable
  std::vector<bool> available;
  /// True where observed - temp_dependent was negative and got clamped to 0.
  std::vector<bool> clamped;

  [[nodiscard]] std::size_t available_hours() const noexcept;
  /// Mean temperature-independent load over available hours.
  [[nodiscard]] double mean_temp_independent() const;
};

/// temp_dependent = sum_k beta_k * XT_k of the hour's season. Hours are
/// unavailable when the season is unfitted, the temperature is unknown or the
/// hour is a gap.
[[nodiscard]] Disaggregation disaggregate(const ParxModel& model, const core::MeterSeries& series);

/// Writes the temperature-independent column back to the store. Unavailable
/// hours are cleared.
void store_disaggregation(core::ReadingStore& store, const Disaggregation& result);

}  // namespace smas::analytics
