#include "smas/stats/kmeans.hpp"

#include <limits>
#include <random>

#include "smas/error.hpp"

namespace smas::stats {

namespace {

double assign_all(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids, std::vector<std::size_t>& out) {
  double inertia = 0.0;
  out.resize(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<std::size_t>(c);
      }
    }
    out[static_cast<std::size_t>(i)] = best_c;
    inertia += best;
  }
  return inertia;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::size_t max_iter, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k == 0 || k > n) {
    throw Error(ErrorCode::invalid_argument,
                "k-means needs 1 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  const auto d = points.cols();
  KMeansResult res;
  res.k = k;
  res.centroids.resize(static_cast<Eigen::Index>(k), d);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  res.centroids.row(0) = points.row(static_cast<Eigen::Index>(pick(rng)));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      nearest[i] = std::min(nearest[i], (points.row(ii) - res.centroids.row(static_cast<Eigen::Index>(c - 1))).squaredNorm());
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    res.centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(far));
  }

  res.inertia = assign_all(points, res.centroids, res.assignments);
  res.inertia_history.push_back(res.inertia);
  std::vector<std::size_t> next;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), d);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(res.assignments[i])) += points.row(static_cast<Eigen::Index>(i));
      ++sizes[res.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      // An emptied cluster keeps its previous centroid.
      if (sizes[c] > 0) {
        res.centroids.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(sizes[c]);
      }
    }
    const double inertia = assign_all(points, res.centroids, next);
    res.inertia_history.push_back(inertia);
    res.inertia = inertia;
    res.iterations = it + 1;
    if (next == res.assignments) {
      res.converged = true;
      break;
    }
    res.assignments.swap(next);
  }
  return res;
}

}  // namespace smas::stats
