#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smas::stats {

/// Equi-width histogram. Bucket i covers [lo + i*width, lo + (i+1)*width); the
/// maximum value lands in the last bucket.
struct Histogram {
  std::size_t bucket_count = 10;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  /// (hi - lo) / bucket_count, or 1 when every value was equal.
  [[nodiscard]] double width() const noexcept;
  [[nodiscard]] std::size_t total() const noexcept;
};

inline constexpr std::size_t kDefaultBuckets = 10;

/// Throws Error(invalid_argument) for empty input, non-finite values or zero buckets.
[[nodiscard]] Histogram equi_width_histogram(std::span<const double> values, std::size_t bucket_count = kDefaultBuckets);

/// Nearest-rank percentile: the ceil(q/100 * n)-th smallest value (the minimum for q = 0).
[[nodiscard]] double percentile(std::span<const double> values, double q);

/// Same as percentile() but may reorder `values`; O(n).
[[nodiscard]] double percentile_inplace(std::span<double> values, double q);

/// Root-mean-square error. Throws Error(invalid_argument) on empty or mismatched input.
[[nodiscard]] double rmse(std::span<const double> actual, std::span<const double> predicted);

}  // namespace smas::stats
