#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

namespace smas::json_io {

using nlohmann::json;

/// Serializes with sorted keys and every float printed with 17 significant
/// digits. Non-finite floats become `null`. Output is byte-stable for equal input.
[[nodiscard]] std::string dump(const json& value);

/// Reads a float written by put_double(); `null` maps back to NaN.
[[nodiscard]] inline double get_double(const json& value) {
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return value.get<double>();
}

/// NaN becomes `null` and infinities the strings "Infinity" / "-Infinity".
[[nodiscard]] inline json put_double(double v) {
  if (std::isnan(v)) return json(nullptr);
  if (std::isinf(v)) return json(v > 0 ? "Infinity" : "-Infinity");
  return json(v);
}

}  // namespace smas::json_io
