#include "smas/stats/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "smas/error.hpp"

namespace smas::stats {

GaussianModel gaussian_fit(std::span<const double> train) {
  if (train.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "gaussian model needs at least two training values");
  }
  const double n = static_cast<double>(train.size());
  double sum = 0.0;
  for (double x : train) sum += x;
  const double mu = sum / n;
  double ss = 0.0;
  for (double x : train) ss += (x - mu) * (x - mu);
  return GaussianModel{mu, ss / n, train.size()};
}

double gaussian_density(const GaussianModel& model, double x) {
  if (model.degenerate()) throw Error(ErrorCode::degenerate_model, "gaussian model has zero variance");
  const double sigma = std::sqrt(model.sigma2);
  const double z = (x - model.mu);
  return std::exp(-z * z / (2.0 * model.sigma2)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace smas::stats
