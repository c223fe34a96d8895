#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "smas/analytics/anomaly.hpp"
#include "smas/analytics/features.hpp"

namespace smas::analytics {

/// Per-meter fitted models, optionally persisted as one JSON document per meter
/// under `<dir>/<escaped meter id>.json`. Safe for concurrent use.
class ModelRegistry {
 public:
  ModelRegistry() = default;
  /// Loads any documents already present in `dir`.
  explicit ModelRegistry(std::filesystem::path dir);

  void put_parx(ParxModel model);
  void put_three_line(ThreeLineModel model);
  void put_profile(DailyProfile profile);
  void put_activity_load(const std::string& meter_id, double value);
  void put_detector(AnomalyDetector detector);

  [[nodiscard]] MeterModels models(const std::string& meter_id) const;
  [[nodiscard]] std::shared_ptr<const AnomalyDetector> detector(const std::string& meter_id) const;
  [[nodiscard]] std::vector<std::string> meter_ids() const;

  /// Writes every meter touched since the last save. No-op without a directory.
  void save();

 private:
  struct Entry {
    MeterModels models;
    std::shared_ptr<const AnomalyDetector> detector;
    bool dirty = false;
  };

  Entry& entry(const std::string& meter_id);

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, Entry> entries_;
};

/// Anomaly reports keyed by (meter, day); a later report for the same key
/// replaces the earlier one. With a path, reports are appended as JSON lines
/// and replayed on open.
class AnomalyLog {
 public:
  AnomalyLog() = default;
  explicit AnomalyLog(std::filesystem::path path);

  void append(const std::vector<AnomalyReport>& reports);
  void append(const AnomalyReport& report);

  /// Reports with day in [from, to], ordered by day then meter.
  [[nodiscard]] std::vector<AnomalyReport> query(const std::optional<std::string>& meter_id, Date from, Date to,
                                                 bool flagged_only = false) const;
  [[nodiscard]] std::size_t size() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::map<std::pair<Date, std::string>, AnomalyReport> reports_;
};

}  // namespace smas::analytics
