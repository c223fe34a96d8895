#include "smas/analytics/features.hpp"

#include <cmath>

#include "smas/error.hpp"

namespace smas::analytics {

CustomerFeatures extract_features(const std::string& meter_id, const MeterModels& models) {
  if (!models.three_line) {
    throw Error(ErrorCode::dependency, "meter " + meter_id + " has no three_line_fit result");
  }
  if (!models.activity_load) {
    throw Error(ErrorCode::dependency, "meter " + meter_id + " has no disaggregate result");
  }
  CustomerFeatures f;
  f.meter_id = meter_id;
  f.base_load = models.three_line->base_load;
  f.heating_gradient = models.three_line->heating_gradient;
  f.cooling_gradient = models.three_line->cooling_gradient;
  f.activity_load = *models.activity_load;
  if (models.profile && models.profile->weekday_available) f.weekday_profile = models.profile->weekday;
  return f;
}

std::vector<std::string> FeatureSelection::names() const {
  std::vector<std::string> out;
  if (base_load) out.emplace_back("base_load");
  if (activity_load) out.emplace_back("activity_load");
  if (heating_gradient) out.emplace_back("heating_gradient");
  if (cooling_gradient) out.emplace_back("cooling_gradient");
  if (weekday_profile) {
    for (int h = 0; h < kHoursPerDay; ++h) out.push_back("profile_h" + std::to_string(h));
  }
  return out;
}

Segmentation segment_customers(const std::vector<CustomerFeatures>& features, std::size_t k,
                               const FeatureSelection& selection, std::uint64_t seed) {
  if (k == 0 || k > features.size()) {
    throw Error(ErrorCode::invalid_argument, "k must be between 1 and the number of meters (" +
                                                 std::to_string(features.size()) + ")");
  }
  Segmentation seg;
  seg.feature_names = selection.names();
  if (seg.feature_names.empty()) throw Error(ErrorCode::invalid_argument, "no features selected");
  const auto n = static_cast<Eigen::Index>(features.size());
  const auto d = static_cast<Eigen::Index>(seg.feature_names.size());
  Eigen::MatrixXd raw(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = features[static_cast<std::size_t>(i)];
    seg.meter_ids.push_back(f.meter_id);
    Eigen::Index c = 0;
    if (selection.base_load) raw(i, c++) = f.base_load;
    if (selection.activity_load) raw(i, c++) = f.activity_load;
    if (selection.heating_gradient) raw(i, c++) = f.heating_gradient;
    if (selection.cooling_gradient) raw(i, c++) = f.cooling_gradient;
    if (selection.weekday_profile) {
      if (!f.weekday_profile) throw Error(ErrorCode::dependency, "meter " + f.meter_id + " has no weekday profile");
      for (double v : *f.weekday_profile) raw(i, c++) = v;
    }
  }
  if (!raw.allFinite()) throw Error(ErrorCode::validation, "features must be finite");
  const Eigen::RowVectorXd mean = raw.colwise().mean();
  Eigen::MatrixXd z = raw.rowwise() - mean;
  for (Eigen::Index c = 0; c < d; ++c) {
    const double sd = std::sqrt(z.col(c).squaredNorm() / static_cast<double>(n));
    if (sd > 0.0) {
      z.col(c) /= sd;
    } else {
      z.col(c).setZero();
    }
  }
  seg.clustering = stats::kmeans(z, k, 100, seed);
  seg.centroids = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), d);
  seg.cluster_sizes.assign(k, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = seg.clustering.assignments[static_cast<std::size_t>(i)];
    seg.centroids.row(static_cast<Eigen::Index>(c)) += raw.row(i);
    ++seg.cluster_sizes[c];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (seg.cluster_sizes[c] > 0) seg.centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(seg.cluster_sizes[c]);
  }
  return seg;
}

}  // namespace smas::analytics
