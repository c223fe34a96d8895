#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smas/analytics/day_grid.hpp"
#include "smas/core/types.hpp"
#include "smas/ingest/csv.hpp"

namespace smas::ingest {

using analytics::DayValues;

/// Typical activity level per hour of day, used as the long-run mean of a series.
struct SeedProfile {
  std::string name;
  DayValues weekday{};
  DayValues weekend{};
};

[[nodiscard]] std::vector<SeedProfile> default_seed_profiles();
/// Per-hour weekday and weekend means of a real series' non-gap consumption.
[[nodiscard]] SeedProfile seed_profile_from_series(const core::MeterSeries& series, std::string name);

/// Annual plus diurnal cosine with Gaussian noise; shared by all series.
struct TemperatureModel {
  double mean_c = 8.0;
  double annual_amplitude_c = 10.0;
  double diurnal_amplitude_c = 4.0;
  double noise_sigma_c = 1.0;
  int warmest_day_of_year = 200;
  int warmest_hour = 15;

  /// Noise-free temperature at `t`.
  [[nodiscard]] double expected(Timestamp t) const;
};

struct CoefficientPrior {
  std::vector<double> alpha{0.3, 0.1, 0.1};
  std::array<double, 3> beta{0.2, -0.03, 0.05};
  /// Each season draws its coefficients uniformly within +-jitter of the prior.
  double alpha_jitter = 0.0;
  double beta_jitter = 0.0;
  /// Fixed intercept for every season; otherwise level * (1 - sum(alpha)).
  std::optional<double> intercept;
};

enum class ResponseModel { parx, three_line };

/// base + cooling * max(0, T - 20) + heating * max(0, 16 - T) + U[0, noise_max].
struct ThreeLineResponse {
  double base_load = 0.5;
  double cooling = 0.4;
  double heating = 0.3;
  double noise_max = 0.1;
};

/// Multiplies the observed values of one day of one series.
struct Injection {
  std::size_t series = 0;
  std::size_t day = 0;
  double factor = 3.0;
};

struct GeneratorSpec {
  std::vector<SeedProfile> seed_profiles;  ///< empty means default_seed_profiles()
  std::size_t n_series = 1;
  std::size_t span_hours = 17520;
  double noise_sigma = 0.05;
  TemperatureModel temperature;
  CoefficientPrior coefficients;
  ResponseModel response = ResponseModel::parx;
  ThreeLineResponse three_line;
  Timestamp start = parse_timestamp("2014-01-01T00:00:00Z");
  std::uint64_t rng_seed = 1;
  std::string id_prefix = "meter";
  double weekend_activity_scale = 1.0;
  std::vector<Injection> injections;
  std::size_t random_anomalies_per_series = 0;
  double anomaly_factor = 3.0;
  /// Random injections land on days >= this index.
  std::size_t anomaly_min_day = 0;

  /// Throws Error(invalid_argument) on an unusable spec.
  void validate() const;
};

struct InjectedAnomaly {
  Date day{};
  double factor = 1.0;
};

/// Ground truth for one generated series.
struct SeriesLabel {
  std::string meter_id;
  std::string profile;
  ResponseModel response = ResponseModel::parx;
  DayValues intercept_weekday{};
  DayValues intercept_weekend{};
  std::array<std::vector<double>, kHoursPerDay> alpha;
  std::array<std::array<double, 3>, kHoursPerDay> beta{};
  ThreeLineResponse three_line;
  std::vector<InjectedAnomaly> anomalies;
};

/**
 * @brief Deterministic synthetic meter data.
 *
 * PARX series follow y = max(0, c_s + sum_i alpha_si * y(n-i) + beta_s . XT + e)
 * after the first p days, which sit at the profile level plus noise. Injected
 * anomalies scale what is observed but not the underlying recursion. Every
 * series has its own random stream, so series(i) does not depend on call order.
 */
class SyntheticGenerator {
 public:
  explicit SyntheticGenerator(GeneratorSpec spec);

  [[nodiscard]] const GeneratorSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const std::vector<SeriesLabel>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<double>& temperatures() const noexcept { return temperatures_; }
  [[nodiscard]] std::vector<WeatherPoint> weather() const;

  [[nodiscard]] core::MeterSeries series(std::size_t index) const;
  [[nodiscard]] std::vector<core::HourlyReading> readings(std::size_t index) const;
  /// Streams every reading, series by series.
  void for_each_reading(const std::function<void(const core::HourlyReading&)>& sink) const;

  [[nodiscard]] nlohmann::json labels_json() const;

 private:
  GeneratorSpec spec_;
  std::vector<double> temperatures_;
  std::vector<SeriesLabel> labels_;
};

}  // namespace smas::ingest
