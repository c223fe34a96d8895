#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "smas/core/types.hpp"

namespace smas::analytics {

/// Line over one temperature regime: (-inf, 16], [16, 20] or [20, inf).
struct LinePiece {
  bool available = false;
  double slope = 0.0;      ///< kWh per °C
  double intercept = 0.0;  ///< kWh at 0 °C
  std::size_t bins = 0;

  [[nodiscard]] double at(double t) const noexcept { return intercept + slope * t; }
};

/// Three connected pieces for one percentile family.
struct PercentileCurve {
  std::array<LinePiece, 3> pieces;

  /// Evaluates the regime's piece, falling back to the nearest available one.
  /// NaN when no piece is available.
  [[nodiscard]] double at(double t) const noexcept;
};

struct ThreeLineModel {
  std::string meter_id;
  PercentileCurve upper;  ///< 90th percentile family
  PercentileCurve lower;  ///< 10th percentile family
  /// Slope of the upper high-temperature piece.
  double cooling_gradient = 0.0;
  /// Negated slope of the upper low-temperature piece, so heating sensitivity is positive.
  double heating_gradient = 0.0;
  bool cooling_available = false;
  bool heating_available = false;
  /// Lowest point of the lower curve over the observed temperature range, at least 0.
  double base_load = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;

  /// Midpoint of the two percentile curves.
  [[nodiscard]] double predict(double t) const noexcept;
};

struct ThreeLineOptions {
  std::size_t min_bin_observations = 10;
  std::size_t min_bins_per_piece = 3;
  double upper_quantile = 90.0;
  double lower_quantile = 10.0;
};

/**
 * @brief Piecewise-linear thermal sensitivity from per-degree percentiles.
 *
 * Observations are binned by floor(temperature); bins with enough readings give
 * an upper and lower nearest-rank percentile at the bin center. Each family is
 * fitted by least squares on the three regimes, then pieces are shifted to meet
 * at 16 and 20 °C at the average of their two values there. A regime with too
 * few bins is marked unavailable. Throws Error(insufficient_data) when no
 * regime can be fitted.
 */
[[nodiscard]] ThreeLineModel three_line_fit(std::span<const double> temperatures, std::span<const double> loads,
                                            const ThreeLineOptions& options = {});

/// Fits on the non-gap hours of a series.
[[nodiscard]] ThreeLineModel three_line_fit(const core::MeterSeries& series, const ThreeLineOptions& options = {});

}  // namespace smas::analytics
