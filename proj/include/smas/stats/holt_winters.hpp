#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smas::stats {

/// Additive triple exponential smoothing state after the last observation.
struct HoltWintersModel {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t season_length = 24;
  double level = 0.0;
  double trend = 0.0;
  /// Seasonal component indexed by (observation index mod season_length).
  std::vector<double> seasonal;
  std::size_t n_observed = 0;
  double in_sample_rmse = 0.0;
};

/// Fits with fixed smoothing parameters in [0, 1].
[[nodiscard]] HoltWintersModel holt_winters_fit(std::span<const double> series, std::size_t season_length, double alpha,
                                                double beta, double gamma);

/// Fits by grid search over {0.1, ..., 0.9}^3 minimizing one-step in-sample RMSE.
/// Needs at least two full seasons of data.
[[nodiscard]] HoltWintersModel holt_winters_fit(std::span<const double> series, std::size_t season_length = 24);

/// level + h*trend + seasonal for h = 1..horizon.
[[nodiscard]] std::vector<double> holt_winters_forecast(const HoltWintersModel& model, std::size_t horizon);

}  // namespace smas::stats
