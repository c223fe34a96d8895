#include "smas/api/thresholds.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::api {

using nlohmann::json;

ThresholdStore::ThresholdStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;
  const auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) throw Error(ErrorCode::parse, "malformed threshold file " + path_->string());
  try {
    for (const auto& j : doc) {
      ThresholdSetting s{j.at("meter_id").get<std::string>(), j.at("epsilon").get<double>(),
                         parse_timestamp(j.at("updated_at").get<std::string>())};
      settings_[s.meter_id] = s;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed threshold entry: ") + e.what());
  }
}

ThresholdSetting ThresholdStore::set(const std::string& meter_id, double epsilon, Timestamp now) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon >= 1.0) {
    throw Error(ErrorCode::validation, "epsilon must lie in (0, 1)");
  }
  std::lock_guard lock(mutex_);
  ThresholdSetting s{meter_id, epsilon, now};
  settings_[meter_id] = s;
  save_locked();
  return s;
}

std::optional<ThresholdSetting> ThresholdStore::get(const std::string& meter_id) const {
  std::lock_guard lock(mutex_);
  const auto it = settings_.find(meter_id);
  if (it == settings_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ThresholdStore::epsilon(const std::string& meter_id) const {
  const auto s = get(meter_id);
  return s ? std::optional<double>(s->epsilon) : std::nullopt;
}

std::vector<ThresholdSetting> ThresholdStore::all() const {
  std::lock_guard lock(mutex_);
  std::vector<ThresholdSetting> out;
  for (const auto& [id, s] : settings_) out.push_back(s);
  return out;
}

void ThresholdStore::save_locked() const {
  if (!path_) return;
  json doc = json::array();
  for (const auto& [id, s] : settings_) {
    doc.push_back(json{{"meter_id", s.meter_id}, {"epsilon", s.epsilon}, {"updated_at", format_timestamp(s.updated_at)}});
  }
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  const auto tmp = path_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json_io::dump(doc) << '\n';
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
  }
  std::filesystem::rename(tmp, *path_);
}

}  // namespace smas::api
