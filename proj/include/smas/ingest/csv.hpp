#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "smas/core/types.hpp"

namespace smas::ingest {

struct ParseOptions {
  char delimiter = ',';
  /// Collect malformed rows in `skipped` instead of throwing.
  bool skip_malformed = false;
};

struct ParseIssue {
  std::size_t line = 0;
  std::string message;
};

struct MeterParseResult {
  std::vector<core::HourlyReading> readings;
  std::vector<ParseIssue> skipped;
};

/**
 * @brief Reads `meter_id,timestamp,kwh` rows (header required, columns located
 * by name). An optional `temp_c` column fills the temperature.
 *
 * Row errors carry the 1-based line number: Error(parse) for unreadable
 * fields, Error(alignment) for timestamps off the hour and Error(validation)
 * for negative or non-finite kWh. Row order is preserved.
 */
[[nodiscard]] MeterParseResult parse_meter_csv(std::istream& in, const ParseOptions& options = {});
[[nodiscard]] MeterParseResult parse_meter_csv(const std::filesystem::path& path, const ParseOptions& options = {});

struct WeatherPoint {
  Timestamp time{};
  double temp_c = 0.0;

  friend bool operator==(const WeatherPoint&, const WeatherPoint&) = default;
};

struct WeatherParseResult {
  std::vector<WeatherPoint> points;  ///< sorted by time, one per hour
  std::vector<ParseIssue> skipped;
  std::vector<std::string> warnings;
};

/// Reads `timestamp,temp_c` rows. A repeated timestamp keeps the last value and adds a warning.
[[nodiscard]] WeatherParseResult parse_weather_csv(std::istream& in, const ParseOptions& options = {});
[[nodiscard]] WeatherParseResult parse_weather_csv(const std::filesystem::path& path,
                                                   const ParseOptions& options = {});

/// Writes the meter CSV header and rows; `with_temperature` adds a temp_c column.
void write_meter_csv(std::ostream& out, std::span<const core::HourlyReading> rows, bool with_temperature = false);
void write_weather_csv(std::ostream& out, std::span<const WeatherPoint> points);

/// Fills reading temperatures from the weather series. Exact hours are copied;
/// runs of up to `max_gap_hours` missing weather hours are linearly
/// interpolated; readings in longer gaps keep their previous value. Throws
/// Error(validation) when no reading falls inside the weather time range.
[[nodiscard]] std::vector<core::HourlyReading> join_weather(std::span<const core::HourlyReading> readings,
                                                            std::span<const WeatherPoint> weather,
                                                            std::size_t max_gap_hours = 3);

}  // namespace smas::ingest
