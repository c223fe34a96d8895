#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smas/analytics/parx.hpp"
#include "smas/stats/gaussian.hpp"

namespace smas::analytics {

struct AnomalyOptions {
  std::size_t training_days = 182;
  double epsilon = 0.01;
  std::size_t order_p = 3;
  /// Separate distance models for weekdays and weekend days.
  bool weekday_split = false;
  /// A day whose density falls below this is replaced by its prediction in the
  /// history used for later days, so one outlier does not poison the next p
  /// predictions. Independent of epsilon; 0 disables it.
  double history_guard_density = 1e-3;
  std::size_t min_training_distances = 14;
};

struct AnomalyDetector {
  std::string meter_id;
  ParxModel parx;
  stats::GaussianModel gaussian;
  std::optional<stats::GaussianModel> weekend_gaussian;
  double epsilon = 0.01;
  double history_guard_density = 1e-3;
  Date train_from{};
  Date train_to{};  ///< exclusive

  [[nodiscard]] const stats::GaussianModel& model_for(Date day) const;
};

struct AnomalyReport {
  std::string meter_id;
  Date day{};
  double distance = 0.0;
  double density = 0.0;
  bool flagged = false;
  double epsilon = 0.0;
  /// Some hours were missing; distance covers `hours_used` hours only.
  bool partial = false;
  std::size_t hours_used = 0;

  friend bool operator==(const AnomalyReport&, const AnomalyReport&) = default;
};

/// Euclidean norm of actual - predicted. Throws Error(invalid_argument) unless both hold 24 values.
[[nodiscard]] double daily_distance(std::span<const double> actual, std::span<const double> predicted);

/// Density of a distance under the detector's model. A zero-variance model
/// gives +inf at its mean (within 1e-9) and 0 elsewhere.
[[nodiscard]] double distance_density(const stats::GaussianModel& model, double distance);

/**
 * @brief Fits PARX on the first `training_days` days of the series, then a
 * Gaussian on the one-day-ahead distances of every complete training day.
 *
 * Throws Error(insufficient_data) when the series is shorter than the training
 * span or yields fewer than `min_training_distances` distances.
 */
[[nodiscard]] AnomalyDetector train_detector(const core::MeterSeries& series, const AnomalyOptions& options = {});

struct DayDetection {
  AnomalyReport report;
  DayValues predicted{};
};

/// Scores one day. `history[0]` is the previous day. Flags iff density < epsilon;
/// a partial day is flagged only if its distance also exceeds the mean.
[[nodiscard]] DayDetection detect_day(const AnomalyDetector& detector, Date day, const DayValues& actual,
                                      std::span<const DayValues> history, const DayValues& temperatures,
                                      std::optional<double> epsilon = std::nullopt);

/// Rolling per-meter history shared by the batch and streaming detection paths.
class DetectionWindow {
 public:
  DetectionWindow(std::shared_ptr<const AnomalyDetector> detector, std::size_t size_days);

  /// Appends a day to the history without scoring it. Days must advance; a
  /// skipped day enters the history as all-missing.
  void seed(Date day, const DayValues& load);
  /// Scores `day` against the retained history, then appends it (guarded).
  DayDetection process(Date day, const DayValues& actual, const DayValues& temperatures,
                       std::optional<double> epsilon = std::nullopt);

  /// Most recent day first.
  [[nodiscard]] const std::deque<DayValues>& history() const noexcept { return history_; }
  [[nodiscard]] std::optional<Date> last_day() const noexcept { return last_day_; }
  [[nodiscard]] const AnomalyDetector& detector() const noexcept { return *detector_; }

 private:
  void advance_to(Date day);
  void push(const DayValues& values);

  std::shared_ptr<const AnomalyDetector> detector_;
  std::size_t size_days_;
  std::deque<DayValues> history_;
  std::optional<Date> last_day_;
};

/// Batch detection over days `[from, to)` of a series that also covers the
/// `size_days` days before `from`.
[[nodiscard]] std::vector<AnomalyReport> replay_days(std::shared_ptr<const AnomalyDetector> detector,
                                                     const core::MeterSeries& series, Date from, Date to,
                                                     std::size_t size_days = 3,
                                                     std::optional<double> epsilon = std::nullopt);

}  // namespace smas::analytics
