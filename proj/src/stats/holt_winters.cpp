#include "smas/stats/holt_winters.hpp"

#include <cmath>
#include <limits>

#include "smas/error.hpp"

namespace smas::stats {

namespace {

void check_input(std::span<const double> series, std::size_t season_length) {
  if (season_length == 0) throw Error(ErrorCode::invalid_argument, "season length must be positive");
  if (series.size() < 2 * season_length) {
    throw Error(ErrorCode::insufficient_data, "Holt-Winters needs at least two seasons of data");
  }
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "Holt-Winters input must be finite");
  }
}

void check_param(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, "smoothing parameters must lie in [0, 1]");
}

// Runs the recursions and returns the one-step in-sample RMSE; fills `out` if given.
double run(std::span<const double> x, std::size_t len, double alpha, double beta, double gamma,
           HoltWintersModel* out) {
  const double l_d = static_cast<double>(len);
  double mean1 = 0.0;
  double mean2 = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    mean1 += x[i];
    mean2 += x[len + i];
  }
  mean1 /= l_d;
  mean2 /= l_d;
  double trend = (mean2 - mean1) / l_d;
  // Seasonal indices from the detrended first season; level anchored at its last point.
  std::vector<double> seasonal(len);
  const double center = (l_d - 1.0) / 2.0;
  for (std::size_t i = 0; i < len; ++i) seasonal[i] = x[i] - (mean1 + (static_cast<double>(i) - center) * trend);
  double level = mean1 + center * trend;

  double sse = 0.0;
  std::size_t count = 0;
  for (std::size_t t = len; t < x.size(); ++t) {
    const std::size_t s = t % len;
    const double forecast = level + trend + seasonal[s];
    const double err = x[t] - forecast;
    sse += err * err;
    ++count;
    const double prev_level = level;
    level = alpha * (x[t] - seasonal[s]) + (1.0 - alpha) * (level + trend);
    trend = beta * (level - prev_level) + (1.0 - beta) * trend;
    seasonal[s] = gamma * (x[t] - level) + (1.0 - gamma) * seasonal[s];
  }
  const double rmse = std::sqrt(sse / static_cast<double>(count));
  if (out != nullptr) {
    out->alpha = alpha;
    out->beta = beta;
    out->gamma = gamma;
    out->season_length = len;
    out->level = level;
    out->trend = trend;
    out->seasonal = std::move(seasonal);
    out->n_observed = x.size();
    out->in_sample_rmse = rmse;
  }
  return rmse;
}

}  // namespace

HoltWintersModel holt_winters_fit(std::span<const double> series, std::size_t season_length, double alpha, double beta,
                                  double gamma) {
  check_input(series, season_length);
  check_param(alpha);
  check_param(beta);
  check_param(gamma);
  HoltWintersModel model;
  run(series, season_length, alpha, beta, gamma, &model);
  return model;
}

HoltWintersModel holt_winters_fit(std::span<const double> series, std::size_t season_length) {
  check_input(series, season_length);
  double best = std::numeric_limits<double>::infinity();
  double ba = 0.1, bb = 0.1, bg = 0.1;
  for (int a = 1; a <= 9; ++a) {
    for (int b = 1; b <= 9; ++b) {
      for (int g = 1; g <= 9; ++g) {
        const double rmse = run(series, season_length, a / 10.0, b / 10.0, g / 10.0, nullptr);
        if (rmse < best) {
          best = rmse;
          ba = a / 10.0;
          bb = b / 10.0;
          bg = g / 10.0;
        }
      }
    }
  }
  HoltWintersModel model;
  run(series, season_length, ba, bb, bg, &model);
  return model;
}

std::vector<double> holt_winters_forecast(const HoltWintersModel& model, std::size_t horizon) {
  std::vector<double> out(horizon);
  for (std::size_t h = 1; h <= horizon; ++h) {
    const std::size_t idx = (model.n_observed + h - 1) % model.season_length;
    out[h - 1] = model.level + static_cast<double>(h) * model.trend + model.seasonal[idx];
  }
  return out;
}

}  // namespace smas::stats
