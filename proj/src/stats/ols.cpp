#include "smas/stats/ols.hpp"

#include <cmath>
#include <limits>

#include "smas/error.hpp"

namespace smas::stats {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::invalid_argument, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast only below the mean; use symmetry above it.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double student_t_cdf(double t, double dof) {
  const double tail = 0.5 * student_t_two_tailed(t, dof);
  return t >= 0.0 ? 1.0 - tail : tail;
}

OlsFit ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  const auto n = static_cast<std::size_t>(design.rows());
  const auto m = static_cast<std::size_t>(design.cols());
  if (static_cast<std::size_t>(response.size()) != n) {
    throw Error(ErrorCode::invalid_argument, "design and response row counts differ");
  }
  if (n <= m + 1) {
    throw Error(ErrorCode::insufficient_data,
                "regression needs more than " + std::to_string(m + 1) + " samples, got " + std::to_string(n));
  }
  const auto k = static_cast<Eigen::Index>(m + 1);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), k);
  x.col(0).setOnes();
  x.rightCols(static_cast<Eigen::Index>(m)) = design;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    throw SingularFitError(-1, "design matrix is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                                   std::to_string(k) + ")");
  }
  const Eigen::VectorXd beta = qr.solve(response);
  const Eigen::VectorXd resid = response - x * beta;

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
  const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

  OlsFit fit;
  fit.n = n;
  const double dof = static_cast<double>(n - m - 1);
  const double sse = resid.squaredNorm();
  const double mean = response.mean();
  const double sst = (response.array() - mean).square().sum();
  const double sigma2 = sse / dof;
  fit.residual_std_error = std::sqrt(sigma2);
  if (sst > 0.0) {
    fit.r2 = 1.0 - sse / sst;
    fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) / dof;
  } else {
    // Constant response reproduced exactly.
    fit.r2 = 1.0;
    fit.adjusted_r2 = 1.0;
  }
  fit.coefficients.resize(m + 1);
  fit.std_errors.resize(m + 1);
  fit.t_values.resize(m + 1);
  fit.p_values.resize(m + 1);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    fit.coefficients[jj] = beta(j);
    fit.std_errors[jj] = std::sqrt(std::max(0.0, sigma2 * cov(j, j)));
    fit.t_values[jj] = fit.coefficients[jj] / fit.std_errors[jj];
    fit.p_values[jj] = student_t_two_tailed(fit.t_values[jj], dof);
  }
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  return fit;
}

}  // namespace smas::stats
