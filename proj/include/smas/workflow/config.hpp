#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "smas/analytics/registry.hpp"
#include "smas/api/feedback.hpp"
#include "smas/api/thresholds.hpp"
#include "smas/core/store.hpp"
#include "smas/workflow/workflow.hpp"

namespace smas::workflow {

/// Services the built-in worklets operate on. Relative paths in worklet
/// parameters resolve against `data_dir`.
struct WorkletEnvironment {
  core::ReadingStore* store = nullptr;
  analytics::ModelRegistry* registry = nullptr;
  analytics::AnomalyLog* anomalies = nullptr;
  api::ThresholdStore* thresholds = nullptr;
  api::FeedbackEngine* feedback = nullptr;
  std::filesystem::path data_dir = ".";
};

/// Builds worklets by type name from their JSON parameters.
class WorkletCatalog {
 public:
  using Factory = std::function<Worklet(const std::string& name, const json& params)>;

  void add(const std::string& type, Factory factory);
  /// Throws Error(invalid_argument) for an unknown type, listing the known ones.
  [[nodiscard]] Worklet make(const std::string& type, const std::string& name, const json& params) const;
  [[nodiscard]] std::vector<std::string> types() const;

 private:
  std::map<std::string, Factory> factories_;
};

/**
 * @brief Catalog of the shipped worklets:
 *
 * - `ingest_csv` (ingest): `path`, optional `weather`; upserts the readings.
 * - `anonymize_csv` (anonymize): `input`, `output`, `salt`; pseudonymizes meter ids.
 * - `fit_models` (analytics): `order_p`, `training_days`; builds every model.
 * - `detect_anomalies` (analytics): optional `day`, default the day before the
 *   scheduled time; appends the reports to the anomaly log.
 * - `flush` (housekeeping): persists the store and the registry.
 * - `notify` (notify): evaluates the feedback rules at the scheduled time.
 */
[[nodiscard]] WorkletCatalog builtin_worklets(const WorkletEnvironment& env);

/**
 * @brief Reads workflow definitions:
 *
 * `{"workflows": [{"name", "schedule": {"kind", "interval", "anchor",
 * "cluster_class"}, "enabled", "retries", "input", "worklets": [{"name",
 * "type", "params"}]}]}`. Throws Error(invalid_argument) or Error(parse).
 */
[[nodiscard]] std::vector<Workflow> load_workflows(const json& config, const WorkletCatalog& catalog);
[[nodiscard]] std::vector<Workflow> load_workflows(const std::filesystem::path& path, const WorkletCatalog& catalog);

}  // namespace smas::workflow
