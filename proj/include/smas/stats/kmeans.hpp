#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace smas::stats {

struct KMeansResult {
  std::size_t k = 0;
  Eigen::MatrixXd centroids;  ///< k x d
  std::vector<std::size_t> assignments;
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Inertia after every assignment step; non-increasing.
  std::vector<double> inertia_history;
};

/**
 * @brief Lloyd's k-means on the rows of `points` (n x d).
 *
 * Seeding starts from one row drawn with `seed` and adds the farthest remaining
 * row until k centroids exist. Nearest-centroid ties go to the lowest cluster
 * index. Stops when assignments no longer change or after `max_iter` updates.
 * Throws Error(invalid_argument) unless 1 <= k <= n.
 */
[[nodiscard]] KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::size_t max_iter = 100,
                                  std::uint64_t seed = 42);

}  // namespace smas::stats
