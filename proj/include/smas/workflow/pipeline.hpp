#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smas/analytics/anomaly.hpp"
#include "smas/analytics/profile.hpp"
#include "smas/analytics/registry.hpp"
#include "smas/api/thresholds.hpp"
#include "smas/core/store.hpp"

namespace smas::workflow {

struct FitOptions {
  std::size_t order_p = 3;
  analytics::AnomalyOptions anomaly;
  analytics::Calendar calendar;
  /// Meters to fit; empty means every stored meter.
  std::vector<std::string> meters;
};

struct FitSummary {
  std::size_t meters = 0;
  std::size_t parx = 0;
  std::size_t three_line = 0;
  std::size_t profiles = 0;
  std::size_t detectors = 0;
  /// (meter, stage: message) for every model that could not be built.
  std::vector<std::pair<std::string, std::string>> failures;
};

/**
 * @brief Builds every per-meter model from the stored readings: PARX (seasons
 * that cannot be fitted are left unfitted), disaggregation with write-back and
 * activity load, the three-line model, daily profiles and, when the history
 * covers the training span, an anomaly detector.
 */
FitSummary fit_all_models(core::ReadingStore& store, analytics::ModelRegistry& registry, const FitOptions& options = {});

/// Scores `day` for every meter with a detector whose stored readings include
/// that day, using per-meter thresholds when given. Reports are ordered by meter.
[[nodiscard]] std::vector<analytics::AnomalyReport> detect_for_day(const core::ReadingStore& store,
                                                                   const analytics::ModelRegistry& registry,
                                                                   const api::ThresholdStore* thresholds, Date day,
                                                                   std::size_t window_days = 3);

}  // namespace smas::workflow
