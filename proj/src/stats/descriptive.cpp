#include "smas/stats/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smas/error.hpp"

namespace smas::stats {

double Histogram::width() const noexcept {
  if (hi > lo) return (hi - lo) / static_cast<double>(bucket_count);
  return 1.0;
}

std::size_t Histogram::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram equi_width_histogram(std::span<const double> values, std::size_t bucket_count) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "histogram of an empty sample");
  if (bucket_count == 0) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bucket");
  Histogram h;
  h.bucket_count = bucket_count;
  h.counts.assign(bucket_count, 0);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (!std::isfinite(*mn) || !std::isfinite(*mx)) {
    throw Error(ErrorCode::invalid_argument, "histogram input must be finite");
  }
  h.lo = *mn;
  h.hi = *mx;
  const double range = h.hi - h.lo;
  const double buckets = static_cast<double>(bucket_count);
  for (double v : values) {
    std::size_t idx = 0;
    if (range > 0.0) {
      // Scale before dividing so exact multiples of the width are not nudged down a bucket.
      const double pos = std::floor((v - h.lo) * buckets / range);
      idx = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), bucket_count - 1);
    }
    ++h.counts[idx];
  }
  return h;
}

namespace {

std::size_t nearest_rank_index(std::size_t n, double q) {
  if (!(q >= 0.0 && q <= 100.0)) throw Error(ErrorCode::invalid_argument, "percentile must lie in [0, 100]");
  const double rank = std::ceil(q * static_cast<double>(n) / 100.0);
  return static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n))) - 1;
}

}  // namespace

double percentile_inplace(std::span<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "percentile of an empty sample");
  const auto idx = nearest_rank_index(values.size(), q);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(idx);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double percentile(std::span<const double> values, double q) {
  std::vector<double> copy(values.begin(), values.end());
  return percentile_inplace(copy, q);
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) throw Error(ErrorCode::invalid_argument, "rmse inputs differ in length");
  if (actual.empty()) throw Error(ErrorCode::invalid_argument, "rmse of empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = predicted[i] - actual[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

}  // namespace smas::stats
