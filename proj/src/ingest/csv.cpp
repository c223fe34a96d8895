#include "smas/ingest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "smas/error.hpp"

namespace smas::ingest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delimiter, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view text, const char* what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw Error(ErrorCode::parse, std::string("unreadable ") + what + " '" + std::string(text) + "'");
  return v;
}

class Header {
 public:
  Header(std::string_view line, char delimiter) {
    const auto cols = split(line, delimiter);
    for (std::size_t i = 0; i < cols.size(); ++i) index_[std::string(cols[i])] = i;
    width_ = cols.size();
  }
  [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }
  [[nodiscard]] std::size_t require(const std::string& name) const {
    auto i = find(name);
    if (!i) throw Error(ErrorCode::parse, "line 1: missing required column '" + name + "'");
    return *i;
  }
  [[nodiscard]] std::size_t width() const { return width_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::size_t width_ = 0;
};

// Runs `body` for every data line, turning errors into line-numbered ones.
template <typename Body>
std::vector<ParseIssue> for_each_row(std::istream& in, const ParseOptions& options, const Header& header, Body body) {
  std::vector<ParseIssue> skipped;
  std::string line;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      const auto fields = split(line, options.delimiter);
      if (fields.size() != header.width()) {
        throw Error(ErrorCode::parse, "expected " + std::to_string(header.width()) + " fields, found " +
                                          std::to_string(fields.size()));
      }
      body(fields);
    } catch (const Error& e) {
      const std::string msg = "line " + std::to_string(n) + ": " + e.what();
      if (!options.skip_malformed) throw Error(e.code(), msg);
      skipped.push_back({n, msg});
    }
  }
  return skipped;
}

Header read_header(std::istream& in, const ParseOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, "line 1: missing header row");
  return Header(line, options.delimiter);
}

Timestamp parse_hour(std::string_view text) {
  const auto t = parse_timestamp(text);
  if (!is_hour_aligned(t)) throw Error(ErrorCode::alignment, "timestamp " + std::string(text) + " is not on the hour");
  return t;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return in;
}

}  // namespace

MeterParseResult parse_meter_csv(std::istream& in, const ParseOptions& options) {
  const Header header = read_header(in, options);
  const auto c_id = header.require("meter_id");
  const auto c_ts = header.require("timestamp");
  const auto c_kwh = header.require("kwh");
  const auto c_temp = header.find("temp_c");
  MeterParseResult out;
  out.skipped = for_each_row(in, options, header, [&](const std::vector<std::string_view>& f) {
    core::HourlyReading r;
    r.meter_id = std::string(f[c_id]);
    if (r.meter_id.empty()) throw Error(ErrorCode::parse, "empty meter_id");
    r.read_time = parse_hour(f[c_ts]);
    r.consumption = parse_number(f[c_kwh], "kwh");
    if (!std::isfinite(r.consumption) || r.consumption < 0.0) {
      throw Error(ErrorCode::validation, "kwh must be finite and non-negative");
    }
    if (c_temp && !f[*c_temp].empty()) r.temperature = parse_number(f[*c_temp], "temp_c");
    out.readings.push_back(std::move(r));
  });
  return out;
}

MeterParseResult parse_meter_csv(const std::filesystem::path& path, const ParseOptions& options) {
  auto in = open(path);
  return parse_meter_csv(in, options);
}

WeatherParseResult parse_weather_csv(std::istream& in, const ParseOptions& options) {
  const Header header = read_header(in, options);
  const auto c_ts = header.require("timestamp");
  const auto c_temp = header.require("temp_c");
  WeatherParseResult out;
  std::map<Timestamp, double> by_time;
  out.skipped = for_each_row(in, options, header, [&](const std::vector<std::string_view>& f) {
    const auto t = parse_hour(f[c_ts]);
    const double temp = parse_number(f[c_temp], "temp_c");
    if (!std::isfinite(temp)) throw Error(ErrorCode::validation, "temp_c must be finite");
    auto [it, inserted] = by_time.insert_or_assign(t, temp);
    if (!inserted) out.warnings.push_back("duplicate timestamp " + format_timestamp(t) + "; keeping the later value");
  });
  for (const auto& [t, v] : by_time) out.points.push_back({t, v});
  return out;
}

WeatherParseResult parse_weather_csv(const std::filesystem::path& path, const ParseOptions& options) {
  auto in = open(path);
  return parse_weather_csv(in, options);
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_meter_csv(std::ostream& out, std::span<const core::HourlyReading> rows, bool with_temperature) {
  out << (with_temperature ? "meter_id,timestamp,kwh,temp_c\n" : "meter_id,timestamp,kwh\n");
  for (const auto& r : rows) {
    out << r.meter_id << ',' << format_timestamp(r.read_time) << ',' << number(r.consumption);
    if (with_temperature) {
      out << ',';
      if (r.temperature) out << number(*r.temperature);
    }
    out << '\n';
  }
}

void write_weather_csv(std::ostream& out, std::span<const WeatherPoint> points) {
  out << "timestamp,temp_c\n";
  for (const auto& p : points) out << format_timestamp(p.time) << ',' << number(p.temp_c) << '\n';
}

std::vector<core::HourlyReading> join_weather(std::span<const core::HourlyReading> readings,
                                              std::span<const WeatherPoint> weather, std::size_t max_gap_hours) {
  std::vector<WeatherPoint> w(weather.begin(), weather.end());
  std::sort(w.begin(), w.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  const bool overlap = !w.empty() && std::any_of(readings.begin(), readings.end(), [&](const auto& r) {
    return r.read_time >= w.front().time && r.read_time <= w.back().time;
  });
  if (!overlap) throw Error(ErrorCode::validation, "weather series does not overlap the readings");
  std::vector<core::HourlyReading> out(readings.begin(), readings.end());
  for (auto& r : out) {
    auto it = std::lower_bound(w.begin(), w.end(), r.read_time, [](const auto& p, Timestamp t) { return p.time < t; });
    if (it != w.end() && it->time == r.read_time) {
      r.temperature = it->temp_c;
      continue;
    }
    if (it == w.begin() || it == w.end()) continue;
    const auto& next = *it;
    const auto& prev = *(it - 1);
    const auto span = hours_between(prev.time, next.time);
    if (static_cast<std::size_t>(span - 1) > max_gap_hours) continue;
    const double f = static_cast<double>(hours_between(prev.time, r.read_time)) / static_cast<double>(span);
    r.temperature = prev.temp_c + f * (next.temp_c - prev.temp_c);
  }
  return out;
}

}  // namespace smas::ingest
