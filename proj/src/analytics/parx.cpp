#include "smas/analytics/parx.hpp"

#include <cmath>
#include <algorithm>

#include "smas/error.hpp"

namespace smas::analytics {

namespace {
constexpr std::size_t kMinExtraDays = 14;
constexpr std::size_t kMinExtraRows = 4;
}  // namespace

std::size_t ParxModel::fitted_seasons() const noexcept {
  std::size_t n = 0;
  for (const auto& s : seasons) n += s.fitted ? 1 : 0;
  return n;
}

ParxModel parx_fit(const core::MeterSeries& series, const ParxOptions& options) {
  const auto grid = make_day_grid(series);
  return parx_fit(grid, grid.days(), options);
}

ParxModel parx_fit(const DayGrid& grid, std::size_t day_end, const ParxOptions& options) {
  const std::size_t p = options.order_p;
  if (p == 0) throw Error(ErrorCode::invalid_argument, "order_p must be at least 1");
  day_end = std::min(day_end, grid.days());
  if (day_end < p + kMinExtraDays) {
    throw Error(ErrorCode::insufficient_data, "PARX needs at least " + std::to_string(p + kMinExtraDays) +
                                                  " days of data, got " + std::to_string(day_end));
  }
  ParxModel model;
  model.meter_id = grid.meter_id;
  model.order_p = p;
  model.train_from = grid.first_day;
  model.train_to = grid.day(day_end);

  std::vector<std::size_t> rows;
  rows.reserve(day_end);
  for (int s = 0; s < kHoursPerDay; ++s) {
    auto& season = model.seasons[static_cast<std::size_t>(s)];
    season.alpha.assign(p, 0.0);
    rows.clear();
    std::array<bool, 3> active{};
    for (std::size_t n = p; n < day_end; ++n) {
      if (!std::isfinite(grid.load[n][s]) || !std::isfinite(grid.temperature[n][s])) continue;
      bool ok = true;
      for (std::size_t i = 1; i <= p && ok; ++i) ok = std::isfinite(grid.load[n - i][s]);
      if (!ok) continue;
      rows.push_back(n);
      const auto x = exogenous_transform(grid.temperature[n][s]);
      for (int k = 0; k < 3; ++k) active[static_cast<std::size_t>(k)] = active[static_cast<std::size_t>(k)] || x[k] != 0.0;
    }
    if (rows.size() <= p + kMinExtraRows) {
      const std::string msg = "season " + std::to_string(s) + " has " + std::to_string(rows.size()) +
                              " complete rows; need more than " + std::to_string(p + kMinExtraRows);
      if (!options.allow_partial) throw Error(ErrorCode::insufficient_data, msg);
      season.failure = msg;
      continue;
    }
    std::size_t m = p;
    for (bool a : active) m += a ? 1 : 0;
    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    Eigen::VectorXd response(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t n = rows[r];
      const auto ri = static_cast<Eigen::Index>(r);
      for (std::size_t i = 1; i <= p; ++i) design(ri, static_cast<Eigen::Index>(i - 1)) = grid.load[n - i][s];
      const auto x = exogenous_transform(grid.temperature[n][s]);
      auto c = static_cast<Eigen::Index>(p);
      for (int k = 0; k < 3; ++k) {
        if (active[static_cast<std::size_t>(k)]) design(ri, c++) = x[k];
      }
      response(ri) = grid.load[n][s];
    }
    try {
      season.diagnostics = stats::ols_fit(design, response);
    } catch (const SingularFitError& e) {
      const std::string msg = "season " + std::to_string(s) + ": " + e.what();
      if (!options.allow_partial) throw SingularFitError(s, msg);
      season.failure = msg;
      continue;
    } catch (const Error& e) {
      if (!options.allow_partial) throw;
      season.failure = "season " + std::to_string(s) + ": " + e.what();
      continue;
    }
    const auto& coef = season.diagnostics.coefficients;
    season.intercept = coef[0];
    for (std::size_t i = 0; i < p; ++i) season.alpha[i] = coef[1 + i];
    std::size_t c = 1 + p;
    for (std::size_t k = 0; k < 3; ++k) {
      season.beta_active[k] = active[k];
      season.beta[k] = active[k] ? coef[c++] : 0.0;
    }
    season.fitted = true;
  }
  return model;
}

namespace {

double linear_prediction(const ParxSeason& season, std::span<const double> history, const ExogenousTemps& exo) {
  double y = season.intercept;
  for (std::size_t i = 0; i < season.alpha.size(); ++i) y += season.alpha[i] * history[i];
  for (int k = 0; k < 3; ++k) y += season.beta[static_cast<std::size_t>(k)] * exo[k];
  return y;
}

}  // namespace

double parx_predict(const ParxModel& model, int season, std::span<const double> history, const ExogenousTemps& exo) {
  if (season < 0 || season >= kHoursPerDay) throw Error(ErrorCode::invalid_argument, "season must be in 0..23");
  if (history.size() != model.order_p) {
    throw Error(ErrorCode::invalid_argument, "history must hold exactly " + std::to_string(model.order_p) +
                                                 " values, got " + std::to_string(history.size()));
  }
  const auto& s = model.seasons[static_cast<std::size_t>(season)];
  if (!s.fitted) throw Error(ErrorCode::dependency, "season " + std::to_string(season) + " is not fitted");
  return std::max(0.0, linear_prediction(s, history, exo));
}

DayValues predict_day(const ParxModel& model, std::span<const DayValues> history, const DayValues& temperatures) {
  const std::size_t p = model.order_p;
  if (history.size() < p) {
    throw Error(ErrorCode::invalid_argument, "predict_day needs " + std::to_string(p) + " days of history");
  }
  DayValues out = nan_day();
  std::vector<double> lags(p);
  for (int s = 0; s < kHoursPerDay; ++s) {
    const auto& season = model.seasons[static_cast<std::size_t>(s)];
    if (!season.fitted || !std::isfinite(temperatures[static_cast<std::size_t>(s)])) continue;
    bool ok = true;
    for (std::size_t i = 0; i < p && ok; ++i) {
      lags[i] = history[i][static_cast<std::size_t>(s)];
      ok = std::isfinite(lags[i]);
    }
    if (!ok) continue;
    out[static_cast<std::size_t>(s)] =
        std::max(0.0, linear_prediction(season, lags, exogenous_transform(temperatures[static_cast<std::size_t>(s)])));
  }
  return out;
}

}  // namespace smas::analytics
