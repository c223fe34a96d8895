#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smas/analytics/day_grid.hpp"
#include "smas/analytics/exogenous.hpp"
#include "smas/core/types.hpp"
#include "smas/stats/ols.hpp"

namespace smas::analytics {

struct ParxOptions {
  std::size_t order_p = 3;
  /// Record failing seasons instead of throwing.
  bool allow_partial = false;
};

/// Sub-model of one hour-of-day season.
struct ParxSeason {
  bool fitted = false;
  double intercept = 0.0;
  std::vector<double> alpha;  ///< alpha[i] multiplies the value i + 1 days back
  std::array<double, 3> beta{};
  /// False when the driver never fired in this season's training rows; beta is then 0.
  std::array<bool, 3> beta_active{};
  stats::OlsFit diagnostics;
  std::string failure;
};

struct ParxModel {
  std::string meter_id;
  std::size_t order_p = 3;
  std::array<ParxSeason, kHoursPerDay> seasons;
  Date train_from{};
  Date train_to{};  ///< exclusive

  [[nodiscard]] std::size_t fitted_seasons() const noexcept;
};

/**
 * @brief Fits one regression per hour of day on lagged same-hour loads and the
 * three temperature drivers, plus an intercept.
 *
 * Rows with a gap in the target, in any lag or in the temperature are left out.
 * Throws Error(insufficient_data) when the series covers fewer than p + 14 days
 * or a season keeps too few rows, and SingularFitError naming the season on a
 * rank-deficient design (unless options.allow_partial).
 */
[[nodiscard]] ParxModel parx_fit(const core::MeterSeries& series, const ParxOptions& options = {});

/// Fits on days `[0, day_end)` of an existing grid.
[[nodiscard]] ParxModel parx_fit(const DayGrid& grid, std::size_t day_end, const ParxOptions& options = {});

/// Prediction for one season. `history[0]` is yesterday's value at this hour.
/// The result is clamped at 0. Throws Error(invalid_argument) when history does
/// not hold exactly order_p values and Error(dependency) for an unfitted season.
[[nodiscard]] double parx_predict(const ParxModel& model, int season, std::span<const double> history,
                                  const ExogenousTemps& exo);

/// Predicts all 24 hours of a day. `history[0]` is the previous day; at least
/// order_p days are needed. Hours with a missing input or an unfitted season are NaN.
[[nodiscard]] DayValues predict_day(const ParxModel& model, std::span<const DayValues> history,
                                    const DayValues& temperatures);

}  // namespace smas::analytics
