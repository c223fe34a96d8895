#include "smas/analytics/evaluation.hpp"

#include <cmath>
#include <optional>

#include "smas/analytics/day_grid.hpp"
#include "smas/analytics/parx.hpp"
#include "smas/error.hpp"

namespace smas::analytics {

std::string_view to_string(EvalMethod m) noexcept {
  switch (m) {
    case EvalMethod::parx: return "parx";
    case EvalMethod::averaging: return "averaging";
    case EvalMethod::three_line: return "three_line";
  }
  return "?";
}

namespace {

MeterEvaluation evaluate_meter(const core::MeterSeries& series, const EvaluationOptions& options) {
  const auto grid = make_day_grid(series);
  const std::size_t p = options.order_p;
  const std::size_t days = grid.days();
  const auto train0 = static_cast<std::size_t>(std::floor(options.train_fraction * static_cast<double>(days)));
  if (train0 < p + 14 || train0 >= days) {
    throw Error(ErrorCode::insufficient_data, "meter " + series.meter_id + " has too few days for evaluation");
  }
  std::vector<double> flat_temp, flat_load;
  flat_temp.reserve(days * kHoursPerDay);
  flat_load.reserve(days * kHoursPerDay);
  for (std::size_t d = 0; d < days; ++d) {
    flat_temp.insert(flat_temp.end(), grid.temperature[d].begin(), grid.temperature[d].end());
    flat_load.insert(flat_load.end(), grid.load[d].begin(), grid.load[d].end());
  }

  std::array<double, kHoursPerDay> sum{};
  std::array<std::size_t, kHoursPerDay> count{};
  auto absorb = [&](std::size_t d) {
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      if (!std::isfinite(grid.load[d][h])) continue;
      sum[h] += grid.load[d][h];
      ++count[h];
    }
  };
  for (std::size_t d = 0; d < train0; ++d) absorb(d);

  MeterEvaluation out;
  out.meter_id = series.meter_id;
  out.train_days = train0;
  std::array<double, kEvalMethods> sse{};
  std::optional<ParxModel> parx;
  std::optional<ThreeLineModel> lines;
  std::vector<DayValues> hist(p);
  for (std::size_t d = train0; d < days; ++d) {
    if ((d - train0) % std::max<std::size_t>(1, options.refit_every_days) == 0) {
      parx = parx_fit(grid, d, ParxOptions{p, true});
      try {
        lines = three_line_fit(std::span(flat_temp).first(d * kHoursPerDay),
                               std::span(flat_load).first(d * kHoursPerDay), options.three_line);
      } catch (const Error&) {
        lines.reset();
      }
      if (options.on_refit) options.on_refit(series.meter_id, d, d);
    }
    double total = 0.0;
    std::size_t n_total = 0;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      total += sum[h];
      n_total += count[h];
    }
    DayValues avg;
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      avg[h] = count[h] > 0 ? sum[h] / static_cast<double>(count[h])
                            : (n_total > 0 ? total / static_cast<double>(n_total) : 0.0);
    }
    for (std::size_t i = 0; i < p; ++i) hist[i] = grid.load[d - 1 - i];
    const DayValues pred_parx = predict_day(*parx, hist, grid.temperature[d]);
    for (std::size_t h = 0; h < kHoursPerDay; ++h) {
      const double y = grid.load[d][h];
      if (!std::isfinite(y)) continue;
      const double t = grid.temperature[d][h];
      double a = pred_parx[h];
      if (!std::isfinite(a)) a = avg[h];
      double c = lines && std::isfinite(t) ? lines->predict(t) : avg[h];
      if (!std::isfinite(c)) c = avg[h];
      sse[0] += (y - a) * (y - a);
      sse[1] += (y - avg[h]) * (y - avg[h]);
      sse[2] += (y - c) * (y - c);
      ++out.test_hours;
    }
    ++out.test_days;
    absorb(d);
  }
  if (out.test_hours == 0) throw Error(ErrorCode::insufficient_data, "meter " + series.meter_id + " has no test hours");
  for (std::size_t m = 0; m < kEvalMethods; ++m) out.rmse[m] = std::sqrt(sse[m] / static_cast<double>(out.test_hours));
  return out;
}

}  // namespace

EvaluationReport evaluate_forecast_rmse(std::span<const core::MeterSeries> meters, const EvaluationOptions& options) {
  if (meters.empty()) throw Error(ErrorCode::invalid_argument, "no meters to evaluate");
  EvaluationReport report;
  for (const auto& series : meters) {
    auto m = evaluate_meter(series, options);
    for (std::size_t k = 0; k < kEvalMethods; ++k) report.mean_rmse[k] += m.rmse[k];
    if (m.rmse[0] < m.rmse[1]) ++report.parx_wins_vs_averaging;
    if (m.rmse[0] < m.rmse[2]) ++report.parx_wins_vs_three_line;
    report.meters.push_back(std::move(m));
  }
  for (auto& v : report.mean_rmse) v /= static_cast<double>(report.meters.size());
  return report;
}

}  // namespace smas::analytics
