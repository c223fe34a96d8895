#pragma once

#include <cstddef>
#include <span>

namespace smas::stats {

/// Univariate normal model with population (divide-by-n) variance.
struct GaussianModel {
  double mu = 0.0;
  double sigma2 = 0.0;
  std::size_t n_train = 0;

  [[nodiscard]] bool degenerate() const noexcept { return !(sigma2 > 0.0); }
};

/// mu = mean(x), sigma2 = mean((x - mu)^2). Needs at least two samples.
[[nodiscard]] GaussianModel gaussian_fit(std::span<const double> train);

/// Normal density at x. Throws Error(degenerate_model) when sigma2 == 0.
[[nodiscard]] double gaussian_density(const GaussianModel& model, double x);

}  // namespace smas::stats
