#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smas/core/types.hpp"

namespace smas::core {

enum class DuplicatePolicy { reject, upsert };

/// A set of meters, given either explicitly or as every meter of a feed area.
struct Selection {
  std::vector<std::string> meter_ids;
  std::optional<std::string> feed_area_id;

  static Selection meters(std::vector<std::string> ids) { return Selection{std::move(ids), std::nullopt}; }
  static Selection feed_area(std::string id) { return Selection{{}, std::move(id)}; }
};

struct StoreOptions {
  /// Minimum neighborhood size for which an average may be released.
  std::size_t privacy_floor = 2;
  /// Internal gaps up to this many hours are linearly interpolated by query_series.
  std::size_t max_interpolated_gap = 6;
};

/**
 * @brief Embedded hourly reading store, one partition per meter.
 *
 * Partitions are sorted row vectors guarded by their own reader/writer lock, so
 * writes are serialized per meter while reads proceed concurrently. Every query
 * returns a copy, which callers may hand to other threads freely.
 *
 * When opened on a directory, flush() persists each partition as
 * `partitions/<meter>/readings.bin`: a sequence of records, each a little-endian
 * `uint32` payload length (32) followed by `int64` unix seconds, `float64`
 * temperature (NaN if absent), `float64` consumption and `float64`
 * temperature-independent load (NaN if absent). `manifest.json` lists the
 * partitions with their committed row counts plus the customer records.
 */
class ReadingStore {
 public:
  explicit ReadingStore(StoreOptions options = {});
  /// Opens a persistent store rooted at `root`, loading any committed state.
  explicit ReadingStore(std::filesystem::path root, StoreOptions options = {});

  ReadingStore(const ReadingStore&) = delete;
  ReadingStore& operator=(const ReadingStore&) = delete;

  /// All-or-nothing insert. Throws Error(alignment) for timestamps off the hour,
  /// Error(validation) for negative or non-finite values and Error(duplicate)
  /// for an existing (meter, hour) under DuplicatePolicy::reject.
  std::size_t insert_readings(std::span<const HourlyReading> rows, DuplicatePolicy policy = DuplicatePolicy::reject);

  /// Hourly view over `[from, to)`. Throws Error(not_found) for unknown meters.
  [[nodiscard]] MeterSeries query_series(const std::string& meter_id, Timestamp from, Timestamp to) const;
  /// Hourly view from the first to the last stored reading of the meter.
  [[nodiscard]] MeterSeries query_all(const std::string& meter_id) const;
  /// First stored hour and exclusive end, if the meter has any rows.
  [[nodiscard]] std::optional<std::pair<Timestamp, Timestamp>> stored_range(const std::string& meter_id) const;

  /// Calendar-bucketed aggregate of stored hourly consumption over `[from, to)`.
  /// Buckets without readings are omitted; an empty selection yields no buckets.
  [[nodiscard]] std::vector<Bucket> aggregate(const Selection& selection, Granularity granularity, AggregateFn fn,
                                              Timestamp from, Timestamp to) const;

  /// Average over the meter's neighborhood (the meter included) of each member's
  /// bucket sum. Buckets backed by fewer members than the privacy floor are
  /// dropped. Throws Error(not_found) when the meter has no neighborhood and
  /// Error(privacy) when the neighborhood is below the floor.
  [[nodiscard]] std::vector<Bucket> neighborhood_average(const std::string& meter_id, Granularity granularity,
                                                         Timestamp from, Timestamp to) const;

  /// Overwrites the temperature-independent load of stored hours starting at
  /// `start`. NaN clears the value; hours without a stored row are skipped.
  void update_temp_independent(const std::string& meter_id, Timestamp start, std::span<const double> values);

  void upsert_customer(const CustomerRecord& record);
  [[nodiscard]] std::optional<CustomerRecord> customer(const std::string& meter_id) const;
  [[nodiscard]] std::vector<CustomerRecord> customers() const;

  [[nodiscard]] std::vector<std::string> meter_ids() const;
  [[nodiscard]] std::size_t row_count(const std::string& meter_id) const;
  [[nodiscard]] const StoreOptions& options() const noexcept { return options_; }
  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

  /// Persists dirty partitions and rewrites the manifest. No-op for in-memory stores.
  void flush();

 private:
  struct Row {
    std::int64_t t;
    double temperature;
    double consumption;
    double temp_independent;
  };

  struct Partition {
    mutable std::shared_mutex mutex;
    std::vector<Row> rows;
    std::size_t persisted = 0;
    bool needs_rewrite = false;
  };

  [[nodiscard]] const Partition* find(const std::string& meter_id) const;
  [[nodiscard]] std::vector<std::string> resolve(const Selection& selection) const;
  void load();

  StoreOptions options_;
  std::filesystem::path root_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Partition>> partitions_;
  std::map<std::string, CustomerRecord> customers_;
  std::mutex flush_mutex_;
};

/// Bytes one stored hourly reading occupies on disk (length prefix included).
inline constexpr std::size_t kRecordBytes = 36;

/// Directory-safe encoding of a meter id (used for partition directories).
[[nodiscard]] std::string escape_meter_id(const std::string& meter_id);

}  // namespace smas::core
