#include "smas/analytics/disaggregate.hpp"

#include <cmath>
#include <limits>

#include "smas/error.hpp"

namespace smas::analytics {

std::size_t Disaggregation::available_hours() const noexcept {
  std::size_t n = 0;
  for (bool a : available) n += a ? 1 : 0;
  return n;
}

double Disaggregation::mean_temp_independent() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < temp_independent.size(); ++i) {
    if (!available[i]) continue;
    sum += temp_independent[i];
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::insufficient_data, "no disaggregated hours for " + meter_id);
  return sum / static_cast<double>(n);
}

Disaggregation disaggregate(const ParxModel& model, const core::MeterSeries& series) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  Disaggregation out;
  out.meter_id = series.meter_id;
  out.start = series.start;
  const std::size_t n = series.size();
  out.temp_independent.assign(n, kNaN);
  out.temp_dependent.assign(n, kNaN);
  out.available.assign(n, false);
  out.clamped.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& season = model.seasons[static_cast<std::size_t>(hour_of_day(series.time_at(i)))];
    const double obs = series.consumption[i];
    const double t = series.temperature[i];
    const bool gap = i < series.gap_mask.size() && series.gap_mask[i];
    if (!season.fitted || gap || !std::isfinite(t) || !std::isfinite(obs)) continue;
    const auto x = exogenous_transform(t);
    double dep = 0.0;
    for (int k = 0; k < 3; ++k) dep += season.beta[static_cast<std::size_t>(k)] * x[k];
    const double indep = obs - dep;
    out.temp_dependent[i] = dep;
    out.temp_independent[i] = std::max(0.0, indep);
    out.clamped[i] = indep < 0.0;
    out.available[i] = true;
  }
  return out;
}

void store_disaggregation(core::ReadingStore& store, const Disaggregation& result) {
  store.update_temp_independent(result.meter_id, result.start, result.temp_independent);
}

}  // namespace smas::analytics
