#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "smas/analytics/anomaly.hpp"
#include "smas/core/store.hpp"

namespace smas::workflow {

using analytics::AnomalyReport;
using analytics::DayValues;

/// Sliding window over each meter's hourly stream. Both durations are whole
/// days here because detection runs on completed days.
struct WindowSpec {
  std::chrono::hours size{72};
  std::chrono::hours slide{24};

  /// Throws Error(invalid_argument) unless 0 < slide <= size and both are whole days.
  void validate() const;
  [[nodiscard]] std::size_t size_days() const { return static_cast<std::size_t>(size.count() / 24); }
  [[nodiscard]] std::size_t slide_days() const { return static_cast<std::size_t>(slide.count() / 24); }
};

using DetectorLookup = std::function<std::shared_ptr<const analytics::AnomalyDetector>(const std::string&)>;
using EpsilonLookup = std::function<std::optional<double>(const std::string&)>;
/// Sees the retained history (most recent day first) each scored day is predicted from.
using HistoryObserver =
    std::function<void(const std::string& meter_id, Date day, const std::vector<DayValues>& history)>;

struct StreamStats {
  std::size_t accepted = 0;
  /// Readings at or before a meter's latest accepted hour.
  std::size_t late = 0;
  /// Readings off the hour or with invalid values.
  std::size_t invalid = 0;
  std::size_t days_closed = 0;
  std::size_t reports = 0;
  /// Closed days of meters without a detector.
  std::size_t unscored_days = 0;
};

/**
 * @brief Online daily anomaly detection over an hourly reading stream.
 *
 * Readings of one meter must arrive in time order; meters may interleave. A
 * meter's day closes when its last hour arrives, or as a partial day when a
 * reading of a later day arrives first. Closing a day scores it against the
 * window's retained history (every `slide` days when the slide exceeds one
 * day), updates the history and writes the day's readings to the store. A
 * meter's window is primed from days already in the store on its first
 * reading.
 */
class StreamProcessor {
 public:
  StreamProcessor(DetectorLookup detectors, WindowSpec window = {}, core::ReadingStore* store = nullptr);

  void set_epsilon_lookup(EpsilonLookup lookup) { epsilon_ = std::move(lookup); }
  void set_history_observer(HistoryObserver observer) { observer_ = std::move(observer); }

  /// Reports for the days this reading closed, in closing order.
  std::vector<AnomalyReport> push(const core::HourlyReading& reading);

  /// Processes meters in parallel, each meter's readings in order. Reports are
  /// returned ordered by day, then meter id.
  std::vector<AnomalyReport> push_batch(std::span<const core::HourlyReading> readings, std::size_t threads = 0);

  /// Closes every open day as partial (end of stream).
  std::vector<AnomalyReport> close_all();

  [[nodiscard]] StreamStats stats() const;
  [[nodiscard]] const WindowSpec& window() const noexcept { return window_; }

 private:
  struct MeterState {
    std::mutex mutex;
    std::shared_ptr<const analytics::AnomalyDetector> detector;
    std::optional<analytics::DetectionWindow> detection;
    bool initialised = false;
    std::optional<Timestamp> last_time;
    std::optional<Date> open_day;
    DayValues load{};
    DayValues temps{};
    std::vector<core::HourlyReading> rows;
    std::size_t closed_days = 0;
  };

  MeterState& state_for(const std::string& meter_id);
  void initialise(const std::string& meter_id, MeterState& state, Date first_day);
  std::optional<AnomalyReport> close_day(const std::string& meter_id, MeterState& state);
  std::vector<AnomalyReport> push_locked(MeterState& state, const core::HourlyReading& reading);

  DetectorLookup detectors_;
  WindowSpec window_;
  core::ReadingStore* store_;
  EpsilonLookup epsilon_;
  HistoryObserver observer_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<MeterState>> meters_;
  std::atomic<std::size_t> accepted_{0}, late_{0}, invalid_{0}, days_closed_{0}, reports_{0}, unscored_{0};
};

}  // namespace smas::workflow
