#include "smas/workflow/pipeline.hpp"

#include "smas/analytics/disaggregate.hpp"
#include "smas/analytics/parx.hpp"
#include "smas/analytics/three_line.hpp"
#include "smas/error.hpp"

namespace smas::workflow {

FitSummary fit_all_models(core::ReadingStore& store, analytics::ModelRegistry& registry, const FitOptions& options) {
  FitSummary summary;
  const auto meters = options.meters.empty() ? store.meter_ids() : options.meters;
  for (const auto& id : meters) {
    ++summary.meters;
    const auto series = store.query_all(id);
    const auto attempt = [&](const char* stage, auto&& body) {
      try {
        body();
        return true;
      } catch (const Error& e) {
        summary.failures.emplace_back(id, std::string(stage) + ": " + e.what());
        return false;
      }
    };
    attempt("parx", [&] {
      analytics::ParxOptions po;
      po.order_p = options.order_p;
      po.allow_partial = true;
      auto model = analytics::parx_fit(series, po);
      if (model.fitted_seasons() == 0) throw Error(ErrorCode::singular_fit, "no season could be fitted");
      const auto split = analytics::disaggregate(model, series);
      analytics::store_disaggregation(store, split);
      if (split.available_hours() > 0) registry.put_activity_load(id, split.mean_temp_independent());
      registry.put_parx(std::move(model));
      ++summary.parx;
    });
    attempt("three_line", [&] {
      registry.put_three_line(analytics::three_line_fit(series));
      ++summary.three_line;
    });
    attempt("profile", [&] {
      registry.put_profile(analytics::daily_profile(series.start, series.consumption, options.calendar, id));
      ++summary.profiles;
    });
    if (series.size() >= options.anomaly.training_days * kHoursPerDay) {
      attempt("detector", [&] {
        auto ao = options.anomaly;
        ao.order_p = options.order_p;
        registry.put_detector(analytics::train_detector(series, ao));
        ++summary.detectors;
      });
    }
  }
  return summary;
}

std::vector<analytics::AnomalyReport> detect_for_day(const core::ReadingStore& store,
                                                     const analytics::ModelRegistry& registry,
                                                     const api::ThresholdStore* thresholds, Date day,
                                                     std::size_t window_days) {
  std::vector<analytics::AnomalyReport> out;
  for (const auto& id : registry.meter_ids()) {
    const auto detector = registry.detector(id);
    if (!detector) continue;
    const auto stored = store.stored_range(id);
    if (!stored || start_of(day + std::chrono::days{1}) > stored->second || start_of(day) < stored->first) continue;
    const auto from = day - std::chrono::days{static_cast<long>(window_days)};
    const auto series = store.query_series(id, start_of(from), start_of(day + std::chrono::days{1}));
    const auto eps = thresholds ? thresholds->epsilon(id) : std::nullopt;
    auto reports = analytics::replay_days(detector, series, day, day + std::chrono::days{1}, window_days, eps);
    for (auto& r : reports) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace smas::workflow
