#include "smas/analytics/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smas/error.hpp"
#include "smas/stats/holt_winters.hpp"

namespace smas::analytics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kHoltWintersWindow = 24 * 56;
constexpr double kDeadBandTemperature = 18.0;

bool usable(const core::MeterSeries& s, std::size_t i) {
  return std::isfinite(s.consumption[i]) && !(i < s.gap_mask.size() && s.gap_mask[i]);
}

}  // namespace

std::string_view to_string(ForecastMethod m) noexcept {
  switch (m) {
    case ForecastMethod::parx: return "parx";
    case ForecastMethod::holt_winters: return "holt_winters";
    case ForecastMethod::averaging: return "averaging";
  }
  return "?";
}

ForecastMethod parse_forecast_method(std::string_view text) {
  for (auto m : {ForecastMethod::parx, ForecastMethod::holt_winters, ForecastMethod::averaging}) {
    if (text == to_string(m)) return m;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown forecast method '" + std::string(text) + "'; expected one of parx, holt_winters, averaging");
}

DayValues hour_means(const core::MeterSeries& history) {
  std::array<double, kHoursPerDay> sum{};
  std::array<std::size_t, kHoursPerDay> n{};
  double all = 0.0;
  std::size_t n_all = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (!usable(history, i)) continue;
    const auto h = static_cast<std::size_t>(hour_of_day(history.time_at(i)));
    sum[h] += history.consumption[i];
    ++n[h];
    all += history.consumption[i];
    ++n_all;
  }
  if (n_all == 0) throw Error(ErrorCode::insufficient_data, "no usable history for " + history.meter_id);
  DayValues out;
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    out[h] = n[h] > 0 ? sum[h] / static_cast<double>(n[h]) : all / static_cast<double>(n_all);
  }
  return out;
}

HourlyForecast forecast_hourly(ForecastMethod method, const core::MeterSeries& history, std::size_t hours,
                               const ParxModel* parx, std::span<const double> future_temperatures) {
  if (hours == 0) throw Error(ErrorCode::invalid_argument, "horizon must be at least one hour");
  HourlyForecast out;
  out.method = method;
  out.start = history.end();
  out.values.resize(hours);
  const DayValues means = hour_means(history);
  auto hour_at = [&](std::size_t j) {
    return static_cast<std::size_t>(hour_of_day(out.start + static_cast<long>(j) * kHour));
  };

  switch (method) {
    case ForecastMethod::averaging: {
      for (std::size_t j = 0; j < hours; ++j) out.values[j] = means[hour_at(j)];
      break;
    }
    case ForecastMethod::holt_winters: {
      const std::size_t n = history.size();
      const std::size_t first = n > kHoltWintersWindow ? n - kHoltWintersWindow : 0;
      std::vector<double> y;
      y.reserve(n - first);
      for (std::size_t i = first; i < n; ++i) {
        y.push_back(usable(history, i) ? history.consumption[i]
                                       : means[static_cast<std::size_t>(hour_of_day(history.time_at(i)))]);
      }
      const auto model = stats::holt_winters_fit(y, kHoursPerDay);
      out.values = stats::holt_winters_forecast(model, hours);
      for (auto& v : out.values) v = std::max(0.0, v);
      break;
    }
    case ForecastMethod::parx: {
      if (parx == nullptr) throw Error(ErrorCode::dependency, "no PARX model for " + history.meter_id);
      const std::size_t n = history.size();
      const std::size_t p = parx->order_p;
      std::vector<double> y(n + hours, kNaN);
      std::vector<double> temp(n + hours, kNaN);
      DayValues temp_means{};
      std::array<std::size_t, kHoursPerDay> temp_n{};
      for (std::size_t i = 0; i < n; ++i) {
        if (usable(history, i)) y[i] = history.consumption[i];
        temp[i] = history.temperature[i];
        if (std::isfinite(temp[i])) {
          const auto h = static_cast<std::size_t>(hour_of_day(history.time_at(i)));
          temp_means[h] += temp[i];
          ++temp_n[h];
        }
      }
      for (std::size_t h = 0; h < kHoursPerDay; ++h) {
        temp_means[h] = temp_n[h] > 0 ? temp_means[h] / static_cast<double>(temp_n[h]) : kDeadBandTemperature;
      }
      std::vector<double> lags(p);
      for (std::size_t j = 0; j < hours; ++j) {
        const std::size_t i = n + j;
        const std::size_t s = hour_at(j);
        double t = j < future_temperatures.size() ? future_temperatures[j] : kNaN;
        if (!std::isfinite(t)) {
          out.temperature_fallback = true;
          t = i >= 24 && std::isfinite(temp[i - 24]) ? temp[i - 24] : temp_means[s];
        }
        temp[i] = t;
        for (std::size_t k = 0; k < p; ++k) {
          const std::size_t back = 24 * (k + 1);
          lags[k] = i >= back && std::isfinite(y[i - back]) ? y[i - back] : means[s];
        }
        y[i] = parx->seasons[s].fitted ? parx_predict(*parx, static_cast<int>(s), lags, exogenous_transform(t))
                                       : means[s];
        out.values[j] = y[i];
      }
      break;
    }
  }
  return out;
}

BucketForecast forecast(ForecastMethod method, const core::MeterSeries& history, core::Granularity granularity,
                        std::size_t horizon, const ParxModel* parx, std::span<const double> future_temperatures) {
  if (horizon == 0) throw Error(ErrorCode::invalid_argument, "horizon must be at least 1");
  const Timestamp t0 = history.end();
  Timestamp first = core::bucket_start(t0, granularity);
  if (first < t0) first = core::next_bucket(first, granularity);
  std::vector<Timestamp> edges{first};
  for (std::size_t b = 0; b < horizon; ++b) edges.push_back(core::next_bucket(edges.back(), granularity));
  BucketForecast out;
  out.hourly = forecast_hourly(method, history, static_cast<std::size_t>(hours_between(t0, edges.back())), parx,
                               future_temperatures);
  for (std::size_t b = 0; b < horizon; ++b) {
    core::Bucket bucket{edges[b], 0.0, 0};
    const auto from = static_cast<std::size_t>(hours_between(t0, edges[b]));
    const auto to = static_cast<std::size_t>(hours_between(t0, edges[b + 1]));
    for (std::size_t j = from; j < to; ++j) bucket.value += out.hourly.values[j];
    bucket.count = to - from;
    out.buckets.push_back(bucket);
  }
  return out;
}

}  // namespace smas::analytics
