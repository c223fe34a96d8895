#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "smas/analytics/parx.hpp"
#include "smas/core/types.hpp"

namespace smas::analytics {

enum class ForecastMethod { parx, holt_winters, averaging };

[[nodiscard]] std::string_view to_string(ForecastMethod m) noexcept;
/// Throws Error(invalid_argument) listing the accepted names.
[[nodiscard]] ForecastMethod parse_forecast_method(std::string_view text);

struct HourlyForecast {
  ForecastMethod method = ForecastMethod::averaging;
  Timestamp start{};
  std::vector<double> values;
  /// Set when some future hour had no forecast temperature and reused the
  /// temperature 24 hours earlier.
  bool temperature_fallback = false;
};

/// Per-hour-of-day means of the non-gap history.
[[nodiscard]] DayValues hour_means(const core::MeterSeries& history);

/**
 * @brief Forecasts `hours` values starting at history.end().
 *
 * parx rolls the season models forward, feeding predictions back as lags;
 * `parx` must then be non-null. `future_temperatures[j]` is the forecast for
 * hour j (NaN or missing entries fall back to the same hour of the previous
 * day). averaging repeats the hour-of-day means; holt_winters fits a daily
 * seasonal model by grid search. Values are clamped at 0.
 */
[[nodiscard]] HourlyForecast forecast_hourly(ForecastMethod method, const core::MeterSeries& history, std::size_t hours,
                                             const ParxModel* parx = nullptr,
                                             std::span<const double> future_temperatures = {});

/// Forecast summed into `horizon` whole calendar buckets, the first being the
/// earliest bucket starting at or after history.end().
struct BucketForecast {
  HourlyForecast hourly;
  std::vector<core::Bucket> buckets;
};

[[nodiscard]] BucketForecast forecast(ForecastMethod method, const core::MeterSeries& history,
                                      core::Granularity granularity, std::size_t horizon,
                                      const ParxModel* parx = nullptr, std::span<const double> future_temperatures = {});

}  // namespace smas::analytics
