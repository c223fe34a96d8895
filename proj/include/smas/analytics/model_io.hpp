#pragma once

#include <nlohmann/json.hpp>

#include "smas/analytics/anomaly.hpp"
#include "smas/analytics/evaluation.hpp"
#include "smas/analytics/features.hpp"
#include "smas/analytics/forecast.hpp"
#include "smas/analytics/parx.hpp"
#include "smas/analytics/profile.hpp"
#include "smas/analytics/three_line.hpp"
#include "smas/stats/descriptive.hpp"

namespace smas::analytics {

using nlohmann::json;

/// Version written into every exported model document.
inline constexpr int kModelFormatVersion = 1;

// Model documents carry "format_version"; readers reject other versions with
// Error(parse). OLS residuals are not exported.
[[nodiscard]] json to_json(const ParxModel& model);
[[nodiscard]] ParxModel parx_from_json(const json& doc);

[[nodiscard]] json to_json(const ThreeLineModel& model);
[[nodiscard]] ThreeLineModel three_line_from_json(const json& doc);

[[nodiscard]] json to_json(const AnomalyDetector& detector);
[[nodiscard]] AnomalyDetector detector_from_json(const json& doc);

[[nodiscard]] json to_json(const DailyProfile& profile);
[[nodiscard]] DailyProfile profile_from_json(const json& doc);

[[nodiscard]] json to_json(const CustomerFeatures& features);
[[nodiscard]] json to_json(const AnomalyReport& report);
[[nodiscard]] AnomalyReport report_from_json(const json& doc);
[[nodiscard]] json to_json(const Segmentation& segmentation);
[[nodiscard]] json to_json(const EvaluationReport& report);
[[nodiscard]] json to_json(const BucketForecast& forecast);
/// Array of {start, value, count}.
[[nodiscard]] json to_json(std::span<const core::Bucket> buckets);
[[nodiscard]] json to_json(const stats::Histogram& histogram);

}  // namespace smas::analytics
