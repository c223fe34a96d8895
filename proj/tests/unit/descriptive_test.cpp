#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smas/error.hpp"
#include "smas/stats/descriptive.hpp"

using namespace smas;
using namespace smas::stats;

TEST(Histogram, OneValuePerBucket) {
  std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto h = equi_width_histogram(v);
  EXPECT_EQ(h.counts, std::vector<std::size_t>(10, 1));
  EXPECT_DOUBLE_EQ(h.width(), 0.9);
}

TEST(Histogram, DegenerateRange) {
  std::vector<double> v(7, 2.5);
  const auto h = equi_width_histogram(v);
  EXPECT_EQ(h.counts[0], 7u);
  EXPECT_EQ(h.total(), 7u);
  EXPECT_DOUBLE_EQ(h.width(), 1.0);
}

TEST(Histogram, ConservesCountsAndMatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::lognormal_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng() % 2000);
    for (auto& x : v) x = dist(rng);
    const auto h = equi_width_histogram(v);
    EXPECT_EQ(h.total(), v.size());
    // Brute force: count values inside each bucket's edges.
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    if (hi == lo) continue;
    const double w = (hi - lo) / 10.0;
    for (std::size_t i = 0; i < 10; ++i) {
      const double left = lo + static_cast<double>(i) * w;
      const double right = lo + static_cast<double>(i + 1) * w;
      const auto n = std::count_if(v.begin(), v.end(), [&](double x) {
        return x >= left && (i == 9 ? x <= hi : x < right);
      });
      EXPECT_EQ(h.counts[i], static_cast<std::size_t>(n)) << "bucket " << i;
    }
  }
  EXPECT_THROW((void)equi_width_histogram(std::vector<double>{}), Error);
  EXPECT_THROW((void)equi_width_histogram(std::vector<double>{1.0, NAN}), Error);
}

TEST(Percentile, NearestRank) {
  std::vector<double> v{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(percentile(v, 90), 9.0);
  EXPECT_DOUBLE_EQ(percentile(v, 10), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 100), 10.0);
  EXPECT_DOUBLE_EQ(percentile(v, 50), 5.0);
}

TEST(Percentile, AgreesWithSortedDefinition) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng() % 300);
    for (auto& x : v) x = dist(rng);
    const double q = static_cast<double>(rng() % 101);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(v.size()))));
    EXPECT_EQ(percentile(v, q), sorted[std::min(rank, v.size()) - 1]);
  }
}

TEST(Rmse, KnownValues) {
  std::vector<double> a{1, 2, 3, 4};
  std::vector<double> p{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(rmse(a, p), 0.0);
  std::vector<double> q{2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(rmse(a, q), 1.0);
  std::vector<double> r{1, 2, 3, 6};
  EXPECT_DOUBLE_EQ(rmse(a, r), 1.0);
  EXPECT_THROW((void)rmse(a, std::vector<double>{1.0}), Error);
}
