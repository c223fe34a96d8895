#include "smas/analytics/registry.hpp"

#include <fstream>

#include "smas/analytics/model_io.hpp"
#include "smas/core/store.hpp"
#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::analytics {

ModelRegistry::ModelRegistry(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(*dir_);
  for (const auto& item : std::filesystem::directory_iterator(*dir_)) {
    if (item.path().extension() != ".json") continue;
    std::ifstream in(item.path());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, "cannot read " + item.path().string() + ": " + e.what());
    }
    const auto id = doc.at("meter_id").get<std::string>();
    Entry& e = entries_[id];
    if (doc.contains("parx")) e.models.parx = parx_from_json(doc.at("parx"));
    if (doc.contains("three_line")) e.models.three_line = three_line_from_json(doc.at("three_line"));
    if (doc.contains("profile")) e.models.profile = profile_from_json(doc.at("profile"));
    if (doc.contains("activity_load")) e.models.activity_load = json_io::get_double(doc.at("activity_load"));
    if (doc.contains("detector")) e.detector = std::make_shared<AnomalyDetector>(detector_from_json(doc.at("detector")));
  }
}

ModelRegistry::Entry& ModelRegistry::entry(const std::string& meter_id) {
  Entry& e = entries_[meter_id];
  e.dirty = true;
  return e;
}

void ModelRegistry::put_parx(ParxModel model) {
  std::unique_lock lock(mutex_);
  auto id = model.meter_id;
  entry(id).models.parx = std::move(model);
}

void ModelRegistry::put_three_line(ThreeLineModel model) {
  std::unique_lock lock(mutex_);
  auto id = model.meter_id;
  entry(id).models.three_line = std::move(model);
}

void ModelRegistry::put_profile(DailyProfile profile) {
  std::unique_lock lock(mutex_);
  auto id = profile.meter_id;
  entry(id).models.profile = std::move(profile);
}

void ModelRegistry::put_activity_load(const std::string& meter_id, double value) {
  std::unique_lock lock(mutex_);
  entry(meter_id).models.activity_load = value;
}

void ModelRegistry::put_detector(AnomalyDetector detector) {
  std::unique_lock lock(mutex_);
  auto id = detector.meter_id;
  entry(id).detector = std::make_shared<const AnomalyDetector>(std::move(detector));
}

MeterModels ModelRegistry::models(const std::string& meter_id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(meter_id);
  return it == entries_.end() ? MeterModels{} : it->second.models;
}

std::shared_ptr<const AnomalyDetector> ModelRegistry::detector(const std::string& meter_id) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(meter_id);
  return it == entries_.end() ? nullptr : it->second.detector;
}

std::vector<std::string> ModelRegistry::meter_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, e] : entries_) out.push_back(id);
  return out;
}

void ModelRegistry::save() {
  if (!dir_) return;
  std::unique_lock lock(mutex_);
  for (auto& [id, e] : entries_) {
    if (!e.dirty) continue;
    json doc{{"format_version", kModelFormatVersion}, {"meter_id", id}};
    if (e.models.parx) doc["parx"] = to_json(*e.models.parx);
    if (e.models.three_line) doc["three_line"] = to_json(*e.models.three_line);
    if (e.models.profile) doc["profile"] = to_json(*e.models.profile);
    if (e.models.activity_load) doc["activity_load"] = json_io::put_double(*e.models.activity_load);
    if (e.detector) doc["detector"] = to_json(*e.detector);
    const auto file = *dir_ / (core::escape_meter_id(id) + ".json");
    const auto tmp = file.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
      out << json_io::dump(doc) << '\n';
    }
    std::filesystem::rename(tmp, file);
    e.dirty = false;
  }
}

AnomalyLog::AnomalyLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  std::ifstream in(*path_);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      auto r = report_from_json(json::parse(line));
      auto key = std::make_pair(r.day, r.meter_id);
      reports_[key] = std::move(r);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::parse, path_->string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
}

void AnomalyLog::append(const AnomalyReport& report) { append(std::vector<AnomalyReport>{report}); }

void AnomalyLog::append(const std::vector<AnomalyReport>& reports) {
  std::lock_guard lock(mutex_);
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw Error(ErrorCode::io, "cannot append to " + path_->string());
    for (const auto& r : reports) out << json_io::dump(to_json(r)) << '\n';
  }
  for (const auto& r : reports) reports_[{r.day, r.meter_id}] = r;
}

std::vector<AnomalyReport> AnomalyLog::query(const std::optional<std::string>& meter_id, Date from, Date to,
                                             bool flagged_only) const {
  std::lock_guard lock(mutex_);
  std::vector<AnomalyReport> out;
  for (auto it = reports_.lower_bound({from, std::string{}}); it != reports_.end() && it->first.first <= to; ++it) {
    const auto& r = it->second;
    if (meter_id && r.meter_id != *meter_id) continue;
    if (flagged_only && !r.flagged) continue;
    out.push_back(r);
  }
  return out;
}

std::size_t AnomalyLog::size() const {
  std::lock_guard lock(mutex_);
  return reports_.size();
}

}  // namespace smas::analytics
