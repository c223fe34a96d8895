#include "smas/analytics/anomaly.hpp"

#include <cmath>
#include <limits>

#include "smas/analytics/day_grid.hpp"
#include "smas/error.hpp"

namespace smas::analytics {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDegenerateTolerance = 1e-9;
}  // namespace

const stats::GaussianModel& AnomalyDetector::model_for(Date day) const {
  if (weekend_gaussian && is_weekend(day)) return *weekend_gaussian;
  return gaussian;
}

double daily_distance(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != kHoursPerDay || predicted.size() != kHoursPerDay) {
    throw Error(ErrorCode::invalid_argument, "daily distance needs 24 actual and 24 predicted values");
  }
  double ss = 0.0;
  for (std::size_t h = 0; h < actual.size(); ++h) {
    const double d = actual[h] - predicted[h];
    ss += d * d;
  }
  return std::sqrt(ss);
}

double distance_density(const stats::GaussianModel& model, double distance) {
  if (!std::isfinite(distance)) return kNaN;
  if (model.degenerate()) {
    return std::abs(distance - model.mu) <= kDegenerateTolerance ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return stats::gaussian_density(model, distance);
}

AnomalyDetector train_detector(const core::MeterSeries& series, const AnomalyOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "epsilon must lie in (0, 1)");
  }
  const auto grid = make_day_grid(series);
  if (grid.days() < options.training_days) {
    throw Error(ErrorCode::insufficient_data, "detector training needs " + std::to_string(options.training_days) +
                                                  " days, series " + series.meter_id + " covers " +
                                                  std::to_string(grid.days()));
  }
  AnomalyDetector det;
  det.meter_id = series.meter_id;
  det.epsilon = options.epsilon;
  det.history_guard_density = options.history_guard_density;
  det.parx = parx_fit(grid, options.training_days, ParxOptions{options.order_p, false});
  det.train_from = det.parx.train_from;
  det.train_to = det.parx.train_to;

  const std::size_t p = options.order_p;
  std::vector<double> weekday, weekend;
  std::vector<DayValues> hist(p);
  for (std::size_t n = p; n < options.training_days; ++n) {
    if (!is_complete(grid.load[n])) continue;
    for (std::size_t i = 0; i < p; ++i) hist[i] = grid.load[n - 1 - i];
    const auto pred = predict_day(det.parx, hist, grid.temperature[n]);
    if (!is_complete(pred)) continue;
    const double x = daily_distance(grid.load[n], pred);
    (options.weekday_split && is_weekend(grid.day(n)) ? weekend : weekday).push_back(x);
  }
  // Distances that agree to rounding error describe a zero-variance model.
  auto fit = [](const std::vector<double>& xs) {
    auto g = stats::gaussian_fit(xs);
    if (std::sqrt(g.sigma2) <= kDegenerateTolerance) g.sigma2 = 0.0;
    return g;
  };
  if (!options.weekday_split) {
    if (weekday.size() < options.min_training_distances) {
      throw Error(ErrorCode::insufficient_data, "only " + std::to_string(weekday.size()) +
                                                    " complete training days for " + series.meter_id);
    }
    det.gaussian = fit(weekday);
  } else {
    if (weekday.size() < options.min_training_distances || weekend.size() < options.min_training_distances) {
      throw Error(ErrorCode::insufficient_data, "too few weekday or weekend training days for " + series.meter_id);
    }
    det.gaussian = fit(weekday);
    det.weekend_gaussian = fit(weekend);
  }
  return det;
}

DayDetection detect_day(const AnomalyDetector& detector, Date day, const DayValues& actual,
                        std::span<const DayValues> history, const DayValues& temperatures,
                        std::optional<double> epsilon) {
  DayDetection out;
  auto& r = out.report;
  r.meter_id = detector.meter_id;
  r.day = day;
  r.epsilon = epsilon.value_or(detector.epsilon);
  out.predicted = predict_day(detector.parx, history, temperatures);
  double ss = 0.0;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    if (!std::isfinite(actual[h]) || !std::isfinite(out.predicted[h])) continue;
    const double d = actual[h] - out.predicted[h];
    ss += d * d;
    ++r.hours_used;
  }
  r.partial = r.hours_used < static_cast<std::size_t>(kHoursPerDay);
  if (r.hours_used == 0) {
    r.distance = kNaN;
    r.density = kNaN;
    r.flagged = false;
    return out;
  }
  const auto& model = detector.model_for(day);
  r.distance = std::sqrt(ss);
  r.density = distance_density(model, r.distance);
  r.flagged = r.density < r.epsilon && (!r.partial || r.distance > model.mu);
  return out;
}

DetectionWindow::DetectionWindow(std::shared_ptr<const AnomalyDetector> detector, std::size_t size_days)
    : detector_(std::move(detector)), size_days_(size_days) {
  if (!detector_) throw Error(ErrorCode::invalid_argument, "detection window needs a detector");
  if (size_days_ < detector_->parx.order_p) {
    throw Error(ErrorCode::invalid_argument, "window must retain at least order_p days");
  }
}

void DetectionWindow::advance_to(Date day) {
  if (last_day_ && day <= *last_day_) {
    throw Error(ErrorCode::validation, "day " + format_date(day) + " is not after " + format_date(*last_day_));
  }
  if (last_day_) {
    for (Date d = *last_day_ + std::chrono::days{1}; d < day; d += std::chrono::days{1}) push(nan_day());
  }
  last_day_ = day;
}

void DetectionWindow::push(const DayValues& values) {
  history_.push_front(values);
  while (history_.size() > size_days_) history_.pop_back();
}

void DetectionWindow::seed(Date day, const DayValues& load) {
  advance_to(day);
  push(load);
}

DayDetection DetectionWindow::process(Date day, const DayValues& actual, const DayValues& temperatures,
                                      std::optional<double> epsilon) {
  advance_to(day);
  std::vector<DayValues> hist(history_.begin(), history_.end());
  while (hist.size() < detector_->parx.order_p) hist.push_back(nan_day());
  auto result = detect_day(*detector_, day, actual, hist, temperatures, epsilon);
  const bool guard = detector_->history_guard_density > 0.0 && std::isfinite(result.report.density) &&
                     result.report.density < detector_->history_guard_density;
  if (guard) {
    DayValues kept = actual;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      if (std::isfinite(result.predicted[h])) kept[h] = result.predicted[h];
    }
    push(kept);
  } else {
    push(actual);
  }
  return result;
}

std::vector<AnomalyReport> replay_days(std::shared_ptr<const AnomalyDetector> detector,
                                       const core::MeterSeries& series, Date from, Date to, std::size_t size_days,
                                       std::optional<double> epsilon) {
  const auto grid = make_day_grid(series);
  DetectionWindow window(std::move(detector), size_days);
  std::vector<AnomalyReport> out;
  const auto index = [&](Date d) { return (d - grid.first_day).count(); };
  for (Date d = from - std::chrono::days{static_cast<long>(size_days)}; d < from; d += std::chrono::days{1}) {
    const auto i = index(d);
    window.seed(d, i >= 0 && static_cast<std::size_t>(i) < grid.days() ? grid.load[static_cast<std::size_t>(i)]
                                                                        : nan_day());
  }
  for (Date d = from; d < to; d += std::chrono::days{1}) {
    const auto i = index(d);
    if (i < 0 || static_cast<std::size_t>(i) >= grid.days()) {
      throw Error(ErrorCode::invalid_argument, "replay day " + format_date(d) + " lies outside the series");
    }
    out.push_back(
        window.process(d, grid.load[static_cast<std::size_t>(i)], grid.temperature[static_cast<std::size_t>(i)], epsilon)
            .report);
  }
  return out;
}

}  // namespace smas::analytics
