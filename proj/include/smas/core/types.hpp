#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smas/time.hpp"

namespace smas::core {

/// One row of the hourly reading table.
struct HourlyReading {
  std::string meter_id;
  Timestamp read_time{};
  std::optional<double> temperature;            ///< degrees Celsius, absent until weather is joined
  double consumption = 0.0;                     ///< kWh, >= 0
  std::optional<double> temp_independent_load;  ///< kWh, filled by disaggregation

  friend bool operator==(const HourlyReading&, const HourlyReading&) = default;
};

/// Contiguous hourly view over one meter. Missing hours carry `gap_mask = true`;
/// their consumption is interpolated for short gaps and NaN otherwise.
struct MeterSeries {
  std::string meter_id;
  Timestamp start{};
  std::vector<double> consumption;
  std::vector<double> temperature;       ///< NaN where unknown
  std::vector<double> temp_independent;  ///< NaN where not yet disaggregated
  std::vector<bool> gap_mask;

  [[nodiscard]] std::size_t size() const noexcept { return consumption.size(); }
  [[nodiscard]] Timestamp time_at(std::size_t i) const { return start + static_cast<long>(i) * kHour; }
  /// Exclusive end of the covered range.
  [[nodiscard]] Timestamp end() const { return time_at(size()); }
  /// Sub-range `[first, first + count)`, clipped to the series.
  [[nodiscard]] MeterSeries slice(std::size_t first, std::size_t count) const;
  /// Empty series of `hours` NaN values with no gaps flagged.
  [[nodiscard]] static MeterSeries make(std::string meter_id, Timestamp start, std::size_t hours);
};

struct CustomerRecord {
  std::string meter_id;
  std::string feed_area_id;
  std::string neighborhood_id;
  bool anonymized = false;

  friend bool operator==(const CustomerRecord&, const CustomerRecord&) = default;
};

enum class Granularity { hourly, daily, weekly, monthly };

enum class AggregateFn { sum, avg, min, max };

[[nodiscard]] std::string_view to_string(Granularity g) noexcept;
[[nodiscard]] std::string_view to_string(AggregateFn f) noexcept;
/// Throws Error(invalid_argument) listing the accepted values.
[[nodiscard]] Granularity parse_granularity(std::string_view text);
[[nodiscard]] AggregateFn parse_aggregate_fn(std::string_view text);

/// Start of the calendar bucket containing `t` (UTC; ISO weeks start Monday).
[[nodiscard]] Timestamp bucket_start(Timestamp t, Granularity g);
/// Start of the bucket following the one that starts at `start`.
[[nodiscard]] Timestamp next_bucket(Timestamp start, Granularity g);

struct Bucket {
  Timestamp start{};
  double value = 0.0;
  std::size_t count = 0;  ///< hourly values (aggregate) or contributing meters (neighborhood)

  friend bool operator==(const Bucket&, const Bucket&) = default;
};

}  // namespace smas::core
