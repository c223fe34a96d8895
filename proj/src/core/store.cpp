#include "smas/core/store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::core {

static_assert(std::endian::native == std::endian::little, "partition files are written in host byte order");

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint32_t kRecordPayload = 32;
static_assert(kRecordBytes == 4 + kRecordPayload);
constexpr int kManifestVersion = 1;

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

void validate(const HourlyReading& r) {
  if (r.meter_id.empty()) throw Error(ErrorCode::validation, "reading without meter id");
  if (!is_hour_aligned(r.read_time)) {
    throw Error(ErrorCode::alignment,
                "reading for " + r.meter_id + " at " + format_timestamp(r.read_time) + " is not hour aligned");
  }
  if (!std::isfinite(r.consumption) || r.consumption < 0.0) {
    throw Error(ErrorCode::validation, "reading for " + r.meter_id + " at " + format_timestamp(r.read_time) +
                                           " has invalid consumption " + std::to_string(r.consumption));
  }
  if (r.temperature && !std::isfinite(*r.temperature)) {
    throw Error(ErrorCode::validation, "non-finite temperature for " + r.meter_id);
  }
  if (r.temp_independent_load && (!std::isfinite(*r.temp_independent_load) || *r.temp_independent_load < 0.0)) {
    throw Error(ErrorCode::validation, "invalid temperature-independent load for " + r.meter_id);
  }
}

void check_range(Timestamp from, Timestamp to) {
  if (!is_hour_aligned(from) || !is_hour_aligned(to)) throw Error(ErrorCode::alignment, "query bounds must be hour aligned");
  if (from >= to) throw Error(ErrorCode::invalid_argument, "query range is empty (from >= to)");
}

struct Accumulator {
  double sum = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    min = std::min(min, v);
    max = std::max(max, v);
    ++count;
  }

  [[nodiscard]] double value(AggregateFn fn) const {
    switch (fn) {
      case AggregateFn::sum: return sum;
      case AggregateFn::avg: return sum / static_cast<double>(count);
      case AggregateFn::min: return min;
      case AggregateFn::max: return max;
    }
    return sum;
  }
};

}  // namespace

std::string escape_meter_id(const std::string& meter_id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < meter_id.size(); ++i) {
    const auto c = static_cast<unsigned char>(meter_id[i]);
    const bool safe = std::isalnum(c) || c == '_' || c == '-' || (c == '.' && i > 0);
    if (safe) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

ReadingStore::ReadingStore(StoreOptions options) : options_(options) {}

ReadingStore::ReadingStore(std::filesystem::path root, StoreOptions options)
    : options_(options), root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "partitions");
  load();
}

std::size_t ReadingStore::insert_readings(std::span<const HourlyReading> rows, DuplicatePolicy policy) {
  std::map<std::string, std::vector<Row>> incoming;
  for (const auto& r : rows) {
    validate(r);
    incoming[r.meter_id].push_back(
        Row{to_unix(r.read_time), opt_or_nan(r.temperature), r.consumption, opt_or_nan(r.temp_independent_load)});
  }
  if (incoming.empty()) return 0;

  // Stable sort keeps batch order among equal timestamps, so the last one wins on upsert.
  for (auto& [meter, batch] : incoming) {
    std::stable_sort(batch.begin(), batch.end(), [](const Row& a, const Row& b) { return a.t < b.t; });
    if (policy == DuplicatePolicy::reject) {
      auto dup = std::adjacent_find(batch.begin(), batch.end(), [](const Row& a, const Row& b) { return a.t == b.t; });
      if (dup != batch.end()) {
        throw Error(ErrorCode::duplicate,
                    "duplicate reading for " + meter + " at " + format_timestamp(from_unix(dup->t)) + " in batch");
      }
    } else {
      std::vector<Row> dedup;
      dedup.reserve(batch.size());
      for (const auto& r : batch) {
        if (!dedup.empty() && dedup.back().t == r.t) {
          dedup.back() = r;
        } else {
          dedup.push_back(r);
        }
      }
      batch = std::move(dedup);
    }
  }

  std::vector<Partition*> targets;
  {
    std::unique_lock lock(map_mutex_);
    for (const auto& [meter, batch] : incoming) {
      auto& slot = partitions_[meter];
      if (!slot) slot = std::make_unique<Partition>();
      targets.push_back(slot.get());
      if (!customers_.contains(meter)) customers_[meter] = CustomerRecord{meter, {}, {}, false};
    }
  }

  // Map iteration order is sorted, so partition locks are always taken in the same order.
  std::vector<std::unique_lock<std::shared_mutex>> locks;
  locks.reserve(targets.size());
  for (auto* p : targets) locks.emplace_back(p->mutex);

  const auto ts_less = [](const Row& a, std::int64_t t) { return a.t < t; };
  if (policy == DuplicatePolicy::reject) {
    std::size_t idx = 0;
    for (const auto& [meter, batch] : incoming) {
      const auto& existing = targets[idx++]->rows;
      for (const auto& r : batch) {
        auto it = std::lower_bound(existing.begin(), existing.end(), r.t, ts_less);
        if (it != existing.end() && it->t == r.t) {
          throw Error(ErrorCode::duplicate,
                      "reading for " + meter + " at " + format_timestamp(from_unix(r.t)) + " already stored");
        }
      }
    }
  }

  std::size_t inserted = 0;
  std::size_t idx = 0;
  for (auto& [meter, batch] : incoming) {
    Partition& part = *targets[idx++];
    inserted += batch.size();
    if (part.rows.empty() || batch.front().t > part.rows.back().t) {
      part.rows.insert(part.rows.end(), batch.begin(), batch.end());
      continue;
    }
    std::vector<Row> merged;
    merged.reserve(part.rows.size() + batch.size());
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t first_change = part.rows.size();
    while (i < part.rows.size() || j < batch.size()) {
      if (j == batch.size() || (i < part.rows.size() && part.rows[i].t < batch[j].t)) {
        merged.push_back(part.rows[i++]);
      } else {
        first_change = std::min(first_change, i);
        if (i < part.rows.size() && part.rows[i].t == batch[j].t) ++i;  // upsert replaces
        merged.push_back(batch[j++]);
      }
    }
    if (first_change < part.persisted) part.needs_rewrite = true;
    part.rows = std::move(merged);
  }
  return inserted;
}

const ReadingStore::Partition* ReadingStore::find(const std::string& meter_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = partitions_.find(meter_id);
  return it == partitions_.end() ? nullptr : it->second.get();
}

MeterSeries ReadingStore::query_series(const std::string& meter_id, Timestamp from, Timestamp to) const {
  check_range(from, to);
  const Partition* part = find(meter_id);
  if (part == nullptr) throw Error(ErrorCode::not_found, "unknown meter '" + meter_id + "'");

  const auto hours = static_cast<std::size_t>(hours_between(from, to));
  MeterSeries s = MeterSeries::make(meter_id, from, hours);
  std::shared_lock lock(part->mutex);
  const auto& rows = part->rows;
  const std::int64_t t0 = to_unix(from);
  const std::int64_t t1 = to_unix(to);
  const auto ts_less = [](const Row& a, std::int64_t t) { return a.t < t; };

  auto it = std::lower_bound(rows.begin(), rows.end(), t0, ts_less);
  std::vector<bool> present(hours, false);
  for (; it != rows.end() && it->t < t1; ++it) {
    const auto i = static_cast<std::size_t>((it->t - t0) / kHour.count());
    present[i] = true;
    s.consumption[i] = it->consumption;
    s.temperature[i] = it->temperature;
    s.temp_independent[i] = it->temp_independent;
  }

  std::size_t i = 0;
  while (i < hours) {
    if (present[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < hours && !present[j]) ++j;
    for (std::size_t k = i; k < j; ++k) s.gap_mask[k] = true;

    const std::int64_t gap_first = t0 + static_cast<std::int64_t>(i) * kHour.count();
    const std::int64_t gap_end = t0 + static_cast<std::int64_t>(j) * kHour.count();
    auto right = std::lower_bound(rows.begin(), rows.end(), gap_end, ts_less);
    auto left_end = std::lower_bound(rows.begin(), rows.end(), gap_first, ts_less);
    if (right != rows.end() && left_end != rows.begin()) {
      const Row& l = *std::prev(left_end);
      const Row& r = *right;
      const auto missing = static_cast<std::size_t>((r.t - l.t) / kHour.count() - 1);
      if (missing <= options_.max_interpolated_gap) {
        const double span = static_cast<double>(r.t - l.t);
        for (std::size_t k = i; k < j; ++k) {
          const double w = static_cast<double>(t0 + static_cast<std::int64_t>(k) * kHour.count() - l.t) / span;
          s.consumption[k] = l.consumption + (r.consumption - l.consumption) * w;
          if (std::isfinite(l.temperature) && std::isfinite(r.temperature)) {
            s.temperature[k] = l.temperature + (r.temperature - l.temperature) * w;
          }
        }
      }
    }
    i = j;
  }
  return s;
}

std::optional<std::pair<Timestamp, Timestamp>> ReadingStore::stored_range(const std::string& meter_id) const {
  const Partition* part = find(meter_id);
  if (part == nullptr) return std::nullopt;
  std::shared_lock lock(part->mutex);
  if (part->rows.empty()) return std::nullopt;
  return std::make_pair(from_unix(part->rows.front().t), from_unix(part->rows.back().t) + kHour);
}

MeterSeries ReadingStore::query_all(const std::string& meter_id) const {
  auto range = stored_range(meter_id);
  if (!range) throw Error(ErrorCode::not_found, "unknown meter '" + meter_id + "'");
  return query_series(meter_id, range->first, range->second);
}

std::vector<std::string> ReadingStore::resolve(const Selection& selection) const {
  std::vector<std::string> ids = selection.meter_ids;
  if (selection.feed_area_id) {
    std::shared_lock lock(map_mutex_);
    for (const auto& [meter, rec] : customers_) {
      if (rec.feed_area_id == *selection.feed_area_id) ids.push_back(meter);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<Bucket> ReadingStore::aggregate(const Selection& selection, Granularity granularity, AggregateFn fn,
                                            Timestamp from, Timestamp to) const {
  check_range(from, to);
  std::map<std::int64_t, Accumulator> buckets;
  const auto ts_less = [](const Row& a, std::int64_t t) { return a.t < t; };
  for (const auto& meter : resolve(selection)) {
    const Partition* part = find(meter);
    if (part == nullptr) continue;
    std::shared_lock lock(part->mutex);
    auto it = std::lower_bound(part->rows.begin(), part->rows.end(), to_unix(from), ts_less);
    std::int64_t current_start = std::numeric_limits<std::int64_t>::min();
    std::int64_t current_end = current_start;
    Accumulator* acc = nullptr;
    for (; it != part->rows.end() && it->t < to_unix(to); ++it) {
      if (it->t >= current_end || it->t < current_start) {
        const Timestamp b = bucket_start(from_unix(it->t), granularity);
        current_start = to_unix(b);
        current_end = to_unix(next_bucket(b, granularity));
        acc = &buckets[current_start];
      }
      acc->add(it->consumption);
    }
  }
  std::vector<Bucket> out;
  out.reserve(buckets.size());
  for (const auto& [start, acc] : buckets) out.push_back(Bucket{from_unix(start), acc.value(fn), acc.count});
  return out;
}

std::vector<Bucket> ReadingStore::neighborhood_average(const std::string& meter_id, Granularity granularity,
                                                       Timestamp from, Timestamp to) const {
  check_range(from, to);
  std::vector<std::string> members;
  {
    std::shared_lock lock(map_mutex_);
    auto it = customers_.find(meter_id);
    if (it == customers_.end() || it->second.neighborhood_id.empty()) {
      throw Error(ErrorCode::not_found, "meter '" + meter_id + "' is not assigned to a neighborhood");
    }
    for (const auto& [id, rec] : customers_) {
      if (rec.neighborhood_id == it->second.neighborhood_id) members.push_back(id);
    }
  }
  if (members.size() < options_.privacy_floor) {
    throw Error(ErrorCode::privacy, "neighborhood has " + std::to_string(members.size()) +
                                        " members, below the privacy floor of " +
                                        std::to_string(options_.privacy_floor));
  }
  std::map<std::int64_t, Accumulator> per_bucket;
  for (const auto& m : members) {
    for (const auto& b : aggregate(Selection::meters({m}), granularity, AggregateFn::sum, from, to)) {
      per_bucket[to_unix(b.start)].add(b.value);
    }
  }
  std::vector<Bucket> out;
  for (const auto& [start, acc] : per_bucket) {
    if (acc.count < options_.privacy_floor) continue;
    out.push_back(Bucket{from_unix(start), acc.value(AggregateFn::avg), acc.count});
  }
  return out;
}

void ReadingStore::update_temp_independent(const std::string& meter_id, Timestamp start,
                                           std::span<const double> values) {
  if (!is_hour_aligned(start)) throw Error(ErrorCode::alignment, "update start must be hour aligned");
  for (double v : values) {
    if (!std::isnan(v) && (!std::isfinite(v) || v < 0.0)) {
      throw Error(ErrorCode::validation, "temperature-independent load must be >= 0");
    }
  }
  Partition* part = const_cast<Partition*>(find(meter_id));
  if (part == nullptr) throw Error(ErrorCode::not_found, "unknown meter '" + meter_id + "'");
  std::unique_lock lock(part->mutex);
  const std::int64_t t0 = to_unix(start);
  const std::int64_t t1 = t0 + static_cast<std::int64_t>(values.size()) * kHour.count();
  auto it = std::lower_bound(part->rows.begin(), part->rows.end(), t0,
                             [](const Row& a, std::int64_t t) { return a.t < t; });
  for (; it != part->rows.end() && it->t < t1; ++it) {
    const double v = values[static_cast<std::size_t>((it->t - t0) / kHour.count())];
    const bool same = (std::isnan(v) && std::isnan(it->temp_independent)) || v == it->temp_independent;
    if (same) continue;
    it->temp_independent = v;
    if (static_cast<std::size_t>(it - part->rows.begin()) < part->persisted) part->needs_rewrite = true;
  }
}

void ReadingStore::upsert_customer(const CustomerRecord& record) {
  if (record.meter_id.empty()) throw Error(ErrorCode::validation, "customer record without meter id");
  std::unique_lock lock(map_mutex_);
  customers_[record.meter_id] = record;
}

std::optional<CustomerRecord> ReadingStore::customer(const std::string& meter_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = customers_.find(meter_id);
  if (it == customers_.end()) return std::nullopt;
  return it->second;
}

std::vector<CustomerRecord> ReadingStore::customers() const {
  std::shared_lock lock(map_mutex_);
  std::vector<CustomerRecord> out;
  out.reserve(customers_.size());
  for (const auto& [id, rec] : customers_) out.push_back(rec);
  return out;
}

std::vector<std::string> ReadingStore::meter_ids() const {
  std::shared_lock lock(map_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, part] : partitions_) out.push_back(id);
  return out;
}

std::size_t ReadingStore::row_count(const std::string& meter_id) const {
  const Partition* part = find(meter_id);
  if (part == nullptr) return 0;
  std::shared_lock lock(part->mutex);
  return part->rows.size();
}

namespace {

void write_rows(std::ofstream& out, const auto* first, const auto* last) {
  char buf[4 + kRecordPayload];
  for (auto* r = first; r != last; ++r) {
    std::memcpy(buf, &kRecordPayload, 4);
    std::memcpy(buf + 4, &r->t, 8);
    std::memcpy(buf + 12, &r->temperature, 8);
    std::memcpy(buf + 20, &r->consumption, 8);
    std::memcpy(buf + 28, &r->temp_independent, 8);
    out.write(buf, sizeof buf);
  }
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void ReadingStore::flush() {
  if (root_.empty()) return;
  std::lock_guard guard(flush_mutex_);
  json_io::json manifest;
  manifest["format_version"] = kManifestVersion;
  manifest["privacy_floor"] = options_.privacy_floor;
  manifest["partitions"] = json_io::json::array();
  manifest["customers"] = json_io::json::array();

  std::shared_lock map_lock(map_mutex_);
  for (const auto& [meter, part] : partitions_) {
    std::unique_lock lock(part->mutex);
    const auto dir_name = escape_meter_id(meter);
    const auto dir = root_ / "partitions" / dir_name;
    std::filesystem::create_directories(dir);
    const auto file = dir / "readings.bin";
    if (part->needs_rewrite || part->persisted > part->rows.size() || !std::filesystem::exists(file)) {
      const auto tmp = file.string() + ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
        write_rows(out, part->rows.data(), part->rows.data() + part->rows.size());
      }
      std::filesystem::rename(tmp, file);
    } else if (part->persisted < part->rows.size()) {
      // Drop any uncommitted tail left by an interrupted flush before appending.
      std::filesystem::resize_file(file, part->persisted * (4 + kRecordPayload));
      std::ofstream out(file, std::ios::binary | std::ios::app);
      if (!out) throw Error(ErrorCode::io, "cannot append " + file.string());
      write_rows(out, part->rows.data() + part->persisted, part->rows.data() + part->rows.size());
    }
    part->persisted = part->rows.size();
    part->needs_rewrite = false;
    manifest["partitions"].push_back({{"meter_id", meter}, {"dir", dir_name}, {"rows", part->rows.size()}});
  }
  for (const auto& [id, rec] : customers_) {
    manifest["customers"].push_back({{"meter_id", rec.meter_id},
                                     {"feed_area_id", rec.feed_area_id},
                                     {"neighborhood_id", rec.neighborhood_id},
                                     {"anonymized", rec.anonymized}});
  }
  write_atomically(root_ / "manifest.json", json_io::dump(manifest));
}

void ReadingStore::load() {
  const auto manifest_path = root_ / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) return;
  std::ifstream in(manifest_path);
  json_io::json manifest;
  try {
    manifest = json_io::json::parse(in);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::io, "corrupt store manifest: " + std::string(e.what()));
  }
  if (manifest.value("format_version", 0) != kManifestVersion) {
    throw Error(ErrorCode::io, "unsupported store manifest version");
  }
  for (const auto& entry : manifest.at("partitions")) {
    const auto meter = entry.at("meter_id").get<std::string>();
    const auto rows = entry.at("rows").get<std::size_t>();
    const auto file = root_ / "partitions" / entry.at("dir").get<std::string>() / "readings.bin";
    auto part = std::make_unique<Partition>();
    std::ifstream data(file, std::ios::binary);
    if (!data) throw Error(ErrorCode::io, "missing partition file " + file.string());
    part->rows.reserve(rows);
    char buf[4 + kRecordPayload];
    // Records past the committed count belong to an unfinished flush and are ignored.
    while (part->rows.size() < rows && data.read(buf, sizeof buf)) {
      std::uint32_t len = 0;
      std::memcpy(&len, buf, 4);
      if (len != kRecordPayload) throw Error(ErrorCode::io, "bad record length in " + file.string());
      Row r{};
      std::memcpy(&r.t, buf + 4, 8);
      std::memcpy(&r.temperature, buf + 12, 8);
      std::memcpy(&r.consumption, buf + 20, 8);
      std::memcpy(&r.temp_independent, buf + 28, 8);
      part->rows.push_back(r);
    }
    if (part->rows.size() != rows) {
      throw Error(ErrorCode::io, "partition " + file.string() + " holds fewer rows than committed");
    }
    part->persisted = rows;
    partitions_[meter] = std::move(part);
  }
  for (const auto& c : manifest.at("customers")) {
    CustomerRecord rec{c.at("meter_id").get<std::string>(), c.at("feed_area_id").get<std::string>(),
                       c.at("neighborhood_id").get<std::string>(), c.at("anonymized").get<bool>()};
    customers_[rec.meter_id] = rec;
  }
}

}  // namespace smas::core
