#include <gtest/gtest.h>

#include <random>
#include <set>

#include "../support/fixtures.hpp"
#include "smas/analytics/disaggregate.hpp"
#include "smas/analytics/features.hpp"
#include "smas/error.hpp"

using namespace smas;
using namespace smas::analytics;

namespace {

CustomerFeatures feature(std::string id, double base, double activity, double heat, double cool) {
  return CustomerFeatures{std::move(id), base, activity, heat, cool, std::nullopt};
}

}  // namespace

TEST(Features, FromThreeLineSynthetic) {
  ingest::GeneratorSpec spec;
  spec.span_hours = 365 * 24;
  spec.response = ingest::ResponseModel::three_line;
  spec.temperature = fixtures::wide_climate();
  ingest::SyntheticGenerator gen(spec);
  const auto series = gen.series(0);
  MeterModels models;
  models.three_line = three_line_fit(series);
  // Disaggregate with the generator's own drivers: what remains is base + noise.
  ParxModel truth;
  for (auto& s : truth.seasons) {
    s.fitted = true;
    s.alpha = {0, 0, 0};
    s.beta = {0.4, 0.3, 0.0};
  }
  models.activity_load = disaggregate(truth, series).mean_temp_independent();
  const auto f = extract_features(series.meter_id, models);
  EXPECT_NEAR(f.cooling_gradient, 0.4, 0.04);
  EXPECT_NEAR(f.heating_gradient, 0.3, 0.03);
  EXPECT_NEAR(f.base_load, 0.5, 0.1);
  EXPECT_NEAR(f.activity_load, 0.55, 0.01);
}

TEST(Features, MissingStagesNamed) {
  MeterModels models;
  try {
    (void)extract_features("m", models);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dependency);
    EXPECT_NE(std::string(e.what()).find("three_line_fit"), std::string::npos);
  }
  models.three_line = ThreeLineModel{};
  try {
    (void)extract_features("m", models);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("disaggregate"), std::string::npos);
  }
}

TEST(Segmentation, TwoPopulationsSeparate) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<CustomerFeatures> fs;
  std::vector<int> truth;
  for (int i = 0; i < 40; ++i) {
    const bool high = i % 2 == 0;
    // Gradients are shared, so they standardise to zero and carry no weight.
    fs.push_back(feature("m" + std::to_string(i), (high ? 1.5 : 0.3) + noise(rng), (high ? 0.4 : 0.9) + noise(rng),
                         0.3, 0.4));
    truth.push_back(high ? 1 : 0);
  }
  const auto seg = segment_customers(fs, 2);
  const auto first = seg.clustering.assignments[0];
  for (std::size_t i = 0; i < fs.size(); ++i) {
    EXPECT_EQ(seg.clustering.assignments[i] == first, truth[i] == truth[0]);
  }
  // Centroids are reported in original units.
  const auto hi = static_cast<Eigen::Index>(first);
  EXPECT_NEAR(seg.centroids(hi, 0), 1.5, 0.05);
  EXPECT_NEAR(seg.centroids(hi, 1), 0.4, 0.05);
  EXPECT_NEAR(seg.centroids(hi, 2), 0.3, 1e-12);
  EXPECT_EQ(seg.cluster_sizes[first], 20u);
}

TEST(Segmentation, SingleClusterIsTheMean) {
  std::vector<CustomerFeatures> fs{feature("a", 1, 2, 3, 4), feature("b", 3, 2, 1, 0), feature("c", 2, 2, 2, 2)};
  const auto seg = segment_customers(fs, 1);
  EXPECT_NEAR(seg.centroids(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(seg.centroids(0, 1), 2.0, 1e-12);
  EXPECT_NEAR(seg.centroids(0, 2), 2.0, 1e-12);
  EXPECT_NEAR(seg.centroids(0, 3), 2.0, 1e-12);
}

TEST(Segmentation, DuplicatesShareCluster) {
  std::vector<CustomerFeatures> fs{feature("a", 1, 1, 0, 0), feature("a", 1, 1, 0, 0), feature("b", 5, 1, 0, 0),
                                   feature("c", 9, 1, 1, 0)};
  const auto seg = segment_customers(fs, 3);
  EXPECT_EQ(seg.clustering.assignments[0], seg.clustering.assignments[1]);
  EXPECT_THROW((void)segment_customers(fs, 5), Error);
  EXPECT_THROW((void)segment_customers(fs, 0), Error);
}
