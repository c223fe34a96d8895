#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace smas::stats {

/// Least-squares fit with the diagnostics of a regression summary table.
/// Coefficient vectors are ordered intercept first, then design columns.
struct OlsFit {
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;  ///< two-tailed, Student-t with n - m - 1 dof
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double residual_std_error = 0.0;
  std::size_t n = 0;
  std::vector<double> residuals;

  [[nodiscard]] std::size_t dof() const noexcept { return n - coefficients.size(); }
};

/// Fits `response ~ 1 + design` by column-pivoted Householder QR.
/// Throws Error(insufficient_data) unless n > m + 1 and SingularFitError when the
/// augmented design is rank deficient.
[[nodiscard]] OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

/// Regularized incomplete beta function I_x(a, b), evaluated by continued fraction.
[[nodiscard]] double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `dof` degrees of freedom.
[[nodiscard]] double student_t_cdf(double t, double dof);

/// Two-tailed p-value P(|T| >= |t|).
[[nodiscard]] double student_t_two_tailed(double t, double dof);

}  // namespace smas::stats
