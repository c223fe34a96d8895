#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smas/analytics/three_line.hpp"
#include "smas/core/types.hpp"

namespace smas::analytics {

enum class EvalMethod { parx = 0, averaging = 1, three_line = 2 };
inline constexpr std::size_t kEvalMethods = 3;

[[nodiscard]] std::string_view to_string(EvalMethod m) noexcept;

struct EvaluationOptions {
  double train_fraction = 0.25;
  std::size_t order_p = 3;
  /// Models are refit every this many test days (1 = daily).
  std::size_t refit_every_days = 1;
  ThreeLineOptions three_line;
  /// Called on every refit with the test day index and the number of training days.
  std::function<void(const std::string& meter_id, std::size_t test_day, std::size_t train_days)> on_refit;
};

struct MeterEvaluation {
  std::string meter_id;
  std::array<double, kEvalMethods> rmse{};
  std::size_t train_days = 0;
  std::size_t test_days = 0;
  std::size_t test_hours = 0;
};

struct EvaluationReport {
  std::vector<MeterEvaluation> meters;
  std::array<double, kEvalMethods> mean_rmse{};
  /// Meters where PARX has strictly lower RMSE than the named method.
  std::size_t parx_wins_vs_averaging = 0;
  std::size_t parx_wins_vs_three_line = 0;
};

/**
 * @brief Walk-forward day-ahead comparison of PARX, hour-of-day averaging and
 * the three-line model.
 *
 * The first `train_fraction` of each meter's days train the models; every
 * later day is predicted from models fitted on all earlier days only, then
 * joins the training set. PARX seasons that cannot be fitted yet, and hours
 * the three-line model cannot score, fall back to the averaging prediction.
 */
[[nodiscard]] EvaluationReport evaluate_forecast_rmse(std::span<const core::MeterSeries> meters,
                                                      const EvaluationOptions& options = {});

}  // namespace smas::analytics
