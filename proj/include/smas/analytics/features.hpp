#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smas/analytics/parx.hpp"
#include "smas/analytics/profile.hpp"
#include "smas/analytics/three_line.hpp"
#include "smas/stats/kmeans.hpp"

namespace smas::analytics {

/// Fitted artifacts of one meter, filled in as pipeline stages complete.
struct MeterModels {
  std::optional<ParxModel> parx;
  std::optional<ThreeLineModel> three_line;
  /// Mean temperature-independent load from the disaggregation stage.
  std::optional<double> activity_load;
  std::optional<DailyProfile> profile;
};

struct CustomerFeatures {
  std::string meter_id;
  double base_load = 0.0;
  double activity_load = 0.0;
  double heating_gradient = 0.0;
  double cooling_gradient = 0.0;
  std::optional<DayValues> weekday_profile;
};

/// Throws Error(dependency) naming the missing stage (three_line_fit or disaggregate).
[[nodiscard]] CustomerFeatures extract_features(const std::string& meter_id, const MeterModels& models);

struct FeatureSelection {
  bool base_load = true;
  bool activity_load = true;
  bool heating_gradient = true;
  bool cooling_gradient = true;
  /// Appends the 24 weekday profile values; every meter then needs a profile.
  bool weekday_profile = false;

  [[nodiscard]] std::vector<std::string> names() const;
};

struct Segmentation {
  std::vector<std::string> meter_ids;
  std::vector<std::string> feature_names;
  stats::KMeansResult clustering;  ///< run on z-scored features
  Eigen::MatrixXd centroids;       ///< k x d, original units
  std::vector<std::size_t> cluster_sizes;
};

/// k-means over z-scored features (a constant feature scores 0). Throws
/// Error(invalid_argument) when k is 0 or exceeds the number of meters.
[[nodiscard]] Segmentation segment_customers(const std::vector<CustomerFeatures>& features, std::size_t k,
                                             const FeatureSelection& selection = {}, std::uint64_t seed = 42);

}  // namespace smas::analytics
