#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "smas/time.hpp"

namespace smas::api {

struct ThresholdSetting {
  std::string meter_id;
  double epsilon = 0.01;
  Timestamp updated_at{};

  friend bool operator==(const ThresholdSetting&, const ThresholdSetting&) = default;
};

/// Per-meter anomaly thresholds. Settings only affect detections made after
/// they change. Optionally persisted as one JSON document.
class ThresholdStore {
 public:
  ThresholdStore() = default;
  explicit ThresholdStore(std::filesystem::path path);

  /// Throws Error(validation) unless 0 < epsilon < 1.
  ThresholdSetting set(const std::string& meter_id, double epsilon, Timestamp now);
  [[nodiscard]] std::optional<ThresholdSetting> get(const std::string& meter_id) const;
  [[nodiscard]] std::optional<double> epsilon(const std::string& meter_id) const;
  [[nodiscard]] std::vector<ThresholdSetting> all() const;

 private:
  void save_locked() const;

  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::map<std::string, ThresholdSetting> settings_;
};

}  // namespace smas::api
