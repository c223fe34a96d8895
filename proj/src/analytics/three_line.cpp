#include "smas/analytics/three_line.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "smas/analytics/exogenous.hpp"
#include "smas/error.hpp"
#include "smas/stats/descriptive.hpp"
#include "smas/stats/ols.hpp"

namespace smas::analytics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int regime_of(double t) noexcept {
  if (t <= kHeatingBreak) return 0;
  if (t <= kCoolingBreak) return 1;
  return 2;
}

LinePiece fit_piece(const std::vector<std::pair<double, double>>& points, std::size_t min_bins) {
  LinePiece piece;
  piece.bins = points.size();
  if (points.size() < min_bins || points.size() < 3) return piece;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(points.size()), 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = points[i].first;
    y(static_cast<Eigen::Index>(i)) = points[i].second;
  }
  const auto fit = stats::ols_fit(x, y);
  piece.available = true;
  piece.intercept = fit.coefficients[0];
  piece.slope = fit.coefficients[1];
  return piece;
}

void connect(PercentileCurve& curve) {
  auto& [low, mid, high] = curve.pieces;
  const bool has16 = low.available && mid.available;
  const bool has20 = mid.available && high.available;
  const double v16 = has16 ? 0.5 * (low.at(kHeatingBreak) + mid.at(kHeatingBreak)) : kNaN;
  const double v20 = has20 ? 0.5 * (mid.at(kCoolingBreak) + high.at(kCoolingBreak)) : kNaN;
  if (has16) low.intercept = v16 - low.slope * kHeatingBreak;
  if (has20) high.intercept = v20 - high.slope * kCoolingBreak;
  if (has16 && has20) {
    mid.slope = (v20 - v16) / (kCoolingBreak - kHeatingBreak);
    mid.intercept = v16 - mid.slope * kHeatingBreak;
  } else if (has16) {
    mid.intercept = v16 - mid.slope * kHeatingBreak;
  } else if (has20) {
    mid.intercept = v20 - mid.slope * kCoolingBreak;
  }
}

}  // namespace

double PercentileCurve::at(double t) const noexcept {
  static constexpr std::array<std::array<int, 3>, 3> kOrder{{{0, 1, 2}, {1, 0, 2}, {2, 1, 0}}};
  const int r = regime_of(t);
  auto order = kOrder[static_cast<std::size_t>(r)];
  if (r == 1 && t > 0.5 * (kHeatingBreak + kCoolingBreak)) order = {1, 2, 0};
  for (int k : order) {
    const auto& piece = pieces[static_cast<std::size_t>(k)];
    if (piece.available) return piece.at(t);
  }
  return kNaN;
}

double ThreeLineModel::predict(double t) const noexcept { return 0.5 * (upper.at(t) + lower.at(t)); }

ThreeLineModel three_line_fit(std::span<const double> temperatures, std::span<const double> loads,
                              const ThreeLineOptions& options) {
  if (temperatures.size() != loads.size()) {
    throw Error(ErrorCode::invalid_argument, "temperature and load lengths differ");
  }
  std::map<long, std::vector<double>> bins;
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -t_min;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const double t = temperatures[i];
    const double y = loads[i];
    if (!std::isfinite(t) || !std::isfinite(y)) continue;
    bins[static_cast<long>(std::floor(t))].push_back(y);
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  std::array<std::vector<std::pair<double, double>>, 3> upper_pts, lower_pts;
  for (auto& [bin, values] : bins) {
    if (values.size() < options.min_bin_observations) continue;
    const double center = static_cast<double>(bin) + 0.5;
    const auto r = static_cast<std::size_t>(regime_of(center));
    upper_pts[r].emplace_back(center, stats::percentile_inplace(values, options.upper_quantile));
    lower_pts[r].emplace_back(center, stats::percentile_inplace(values, options.lower_quantile));
  }
  ThreeLineModel m;
  for (std::size_t r = 0; r < 3; ++r) {
    m.upper.pieces[r] = fit_piece(upper_pts[r], options.min_bins_per_piece);
    m.lower.pieces[r] = fit_piece(lower_pts[r], options.min_bins_per_piece);
  }
  if (!m.upper.pieces[0].available && !m.upper.pieces[1].available && !m.upper.pieces[2].available) {
    throw Error(ErrorCode::insufficient_data, "no temperature regime has enough populated bins");
  }
  connect(m.upper);
  connect(m.lower);
  m.heating_available = m.upper.pieces[0].available;
  m.cooling_available = m.upper.pieces[2].available;
  m.heating_gradient = m.heating_available ? -m.upper.pieces[0].slope : 0.0;
  m.cooling_gradient = m.cooling_available ? m.upper.pieces[2].slope : 0.0;
  m.t_min = t_min;
  m.t_max = t_max;
  double base = std::numeric_limits<double>::infinity();
  for (double t : {t_min, kHeatingBreak, kCoolingBreak, t_max}) {
    if (t < t_min || t > t_max) continue;
    const double v = m.lower.at(t);
    if (std::isfinite(v)) base = std::min(base, v);
  }
  m.base_load = std::isfinite(base) ? std::max(0.0, base) : 0.0;
  return m;
}

ThreeLineModel three_line_fit(const core::MeterSeries& series, const ThreeLineOptions& options) {
  std::vector<double> loads = series.consumption;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (i < series.gap_mask.size() && series.gap_mask[i]) loads[i] = kNaN;
  }
  auto m = three_line_fit(series.temperature, loads, options);
  m.meter_id = series.meter_id;
  return m;
}

}  // namespace smas::analytics
