#include "smas/ingest/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "smas/analytics/exogenous.hpp"
#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::ingest {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

constexpr std::uint64_t kCoefficientStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kWeatherStream = 2;

DayValues shape(std::initializer_list<std::pair<int, double>> points) {
  // Piecewise-linear through (hour, value) anchors, wrapping at midnight.
  std::vector<std::pair<int, double>> p(points);
  DayValues out{};
  for (int h = 0; h < kHoursPerDay; ++h) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto [h0, v0] = p[i];
      const auto [h1raw, v1] = p[(i + 1) % p.size()];
      const int h1 = i + 1 < p.size() ? h1raw : h1raw + 24;
      const int hh = h < h0 ? h + 24 : h;
      if (hh >= h0 && hh < h1) {
        out[static_cast<std::size_t>(h)] = v0 + (v1 - v0) * static_cast<double>(hh - h0) / static_cast<double>(h1 - h0);
        break;
      }
    }
  }
  return out;
}

std::string to_string(ResponseModel r) { return r == ResponseModel::parx ? "parx" : "three_line"; }

}  // namespace

std::vector<SeedProfile> default_seed_profiles() {
  return {
      {"commuter", shape({{0, 0.4}, {6, 0.5}, {8, 1.1}, {10, 0.5}, {17, 0.6}, {19, 1.5}, {22, 0.9}}),
       shape({{0, 0.45}, {7, 0.5}, {10, 1.0}, {14, 0.9}, {19, 1.4}, {22, 0.9}})},
      {"home_day", shape({{0, 0.5}, {6, 0.55}, {9, 1.0}, {13, 1.2}, {18, 1.3}, {22, 0.8}}),
       shape({{0, 0.5}, {7, 0.6}, {11, 1.2}, {18, 1.4}, {22, 0.8}})},
      {"night_owl", shape({{0, 1.0}, {3, 0.6}, {9, 0.4}, {16, 0.6}, {21, 1.4}}),
       shape({{0, 1.2}, {4, 0.6}, {11, 0.5}, {16, 0.7}, {21, 1.5}})},
      {"flat", shape({{0, 0.8}, {12, 0.8}}), shape({{0, 0.8}, {12, 0.8}})},
  };
}

SeedProfile seed_profile_from_series(const core::MeterSeries& series, std::string name) {
  std::array<double, kHoursPerDay> sum_wd{}, sum_we{};
  std::array<std::size_t, kHoursPerDay> n_wd{}, n_we{};
  double all = 0.0;
  std::size_t n_all = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series.consumption[i];
    if (!std::isfinite(v) || (i < series.gap_mask.size() && series.gap_mask[i])) continue;
    const auto t = series.time_at(i);
    const auto h = static_cast<std::size_t>(hour_of_day(t));
    if (is_weekend(date_of(t))) {
      sum_we[h] += v;
      ++n_we[h];
    } else {
      sum_wd[h] += v;
      ++n_wd[h];
    }
    all += v;
    ++n_all;
  }
  if (n_all == 0) throw Error(ErrorCode::insufficient_data, "series " + series.meter_id + " has no usable readings");
  const double mean = all / static_cast<double>(n_all);
  SeedProfile p;
  p.name = std::move(name);
  for (std::size_t h = 0; h < kHoursPerDay; ++h) {
    p.weekday[h] = n_wd[h] ? sum_wd[h] / static_cast<double>(n_wd[h]) : mean;
    p.weekend[h] = n_we[h] ? sum_we[h] / static_cast<double>(n_we[h]) : mean;
  }
  return p;
}

double TemperatureModel::expected(Timestamp t) const {
  using namespace std::chrono;
  const auto d = date_of(t);
  const auto ymd = year_month_day{d};
  const double doy = static_cast<double>((d - sys_days{ymd.year() / January / 1}).count());
  const double hour = static_cast<double>(hour_of_day(t));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return mean_c + annual_amplitude_c * std::cos(two_pi * (doy - warmest_day_of_year) / 365.25) +
         diurnal_amplitude_c * std::cos(two_pi * (hour - warmest_hour) / 24.0);
}

void GeneratorSpec::validate() const {
  if (n_series < 1) throw Error(ErrorCode::invalid_argument, "n_series must be at least 1");
  if (span_hours < static_cast<std::size_t>(kHoursPerDay)) {
    throw Error(ErrorCode::invalid_argument, "span_hours must be at least 24");
  }
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::invalid_argument, "noise_sigma must be non-negative");
  if (!is_hour_aligned(start)) throw Error(ErrorCode::alignment, "generator start must be on the hour");
  if (coefficients.alpha.empty()) throw Error(ErrorCode::invalid_argument, "coefficient prior needs at least one alpha");
  if (coefficients.alpha_jitter < 0.0 || coefficients.beta_jitter < 0.0 || three_line.noise_max < 0.0) {
    throw Error(ErrorCode::invalid_argument, "jitter and noise bounds must be non-negative");
  }
  const std::size_t days = (span_hours + kHoursPerDay - 1) / kHoursPerDay;
  for (const auto& inj : injections) {
    if (inj.series >= n_series || inj.day >= days) {
      throw Error(ErrorCode::invalid_argument, "injection outside the generated range");
    }
  }
  if (random_anomalies_per_series > 0 && anomaly_min_day + random_anomalies_per_series > days) {
    throw Error(ErrorCode::invalid_argument, "not enough days for the requested random anomalies");
  }
}

SyntheticGenerator::SyntheticGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.seed_profiles.empty()) spec_.seed_profiles = default_seed_profiles();

  auto weather_rng = stream(spec_.rng_seed, 0, kWeatherStream);
  std::normal_distribution<double> weather_noise(0.0, 1.0);
  temperatures_.resize(spec_.span_hours);
  for (std::size_t k = 0; k < spec_.span_hours; ++k) {
    const double e = spec_.temperature.noise_sigma_c > 0.0 ? spec_.temperature.noise_sigma_c * weather_noise(weather_rng) : 0.0;
    temperatures_[k] = spec_.temperature.expected(spec_.start + static_cast<long>(k) * kHour) + e;
  }

  const std::size_t p = spec_.coefficients.alpha.size();
  const std::size_t days = (spec_.span_hours + kHoursPerDay - 1) / kHoursPerDay;
  const Date first_day = date_of(spec_.start);
  labels_.resize(spec_.n_series);
  for (std::size_t i = 0; i < spec_.n_series; ++i) {
    auto rng = stream(spec_.rng_seed, i, kCoefficientStream);
    auto& label = labels_[i];
    char id[32];
    std::snprintf(id, sizeof id, "%05zu", i);
    label.meter_id = spec_.id_prefix + "_" + id;
    label.response = spec_.response;
    label.three_line = spec_.three_line;
    std::uniform_int_distribution<std::size_t> pick(0, spec_.seed_profiles.size() - 1);
    const auto& profile = spec_.seed_profiles[pick(rng)];
    label.profile = profile.name;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t s = 0; s < kHoursPerDay; ++s) {
      label.alpha[s].resize(p);
      double alpha_sum = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        label.alpha[s][k] = spec_.coefficients.alpha[k] + spec_.coefficients.alpha_jitter * unit(rng);
        alpha_sum += label.alpha[s][k];
      }
      for (std::size_t k = 0; k < 3; ++k) {
        label.beta[s][k] = spec_.coefficients.beta[k] + spec_.coefficients.beta_jitter * unit(rng);
      }
      const double wd = profile.weekday[s];
      const double we = profile.weekend[s] * spec_.weekend_activity_scale;
      label.intercept_weekday[s] = spec_.coefficients.intercept.value_or(wd * (1.0 - alpha_sum));
      label.intercept_weekend[s] = spec_.coefficients.intercept.value_or(we * (1.0 - alpha_sum));
    }
    std::set<std::size_t> chosen;
    for (const auto& inj : spec_.injections) {
      if (inj.series == i && chosen.insert(inj.day).second) {
        label.anomalies.push_back({first_day + std::chrono::days{static_cast<long>(inj.day)}, inj.factor});
      }
    }
    std::uniform_int_distribution<std::size_t> day_pick(spec_.anomaly_min_day, days - 1);
    for (std::size_t a = 0; a < spec_.random_anomalies_per_series;) {
      const auto d = day_pick(rng);
      if (!chosen.insert(d).second) continue;
      label.anomalies.push_back({first_day + std::chrono::days{static_cast<long>(d)}, spec_.anomaly_factor});
      ++a;
    }
    std::sort(label.anomalies.begin(), label.anomalies.end(),
              [](const auto& a, const auto& b) { return a.day < b.day; });
  }
}

std::vector<WeatherPoint> SyntheticGenerator::weather() const {
  std::vector<WeatherPoint> out(temperatures_.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec_.start + static_cast<long>(k) * kHour, temperatures_[k]};
  return out;
}

core::MeterSeries SyntheticGenerator::series(std::size_t index) const {
  if (index >= labels_.size()) throw Error(ErrorCode::invalid_argument, "series index out of range");
  const auto& label = labels_[index];
  auto rng = stream(spec_.rng_seed, index, kNoiseStream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const std::size_t n = spec_.span_hours;
  const std::size_t p = spec_.coefficients.alpha.size();
  const SeedProfile* profile = &spec_.seed_profiles.front();
  for (const auto& sp : spec_.seed_profiles) {
    if (sp.name == label.profile) {
      profile = &sp;
      break;
    }
  }
  auto series = core::MeterSeries::make(label.meter_id, spec_.start, n);
  series.temperature = temperatures_;
  series.gap_mask.assign(n, false);
  std::vector<double> latent(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Timestamp t = spec_.start + static_cast<long>(k) * kHour;
    const auto s = static_cast<std::size_t>(hour_of_day(t));
    const double temp = temperatures_[k];
    double y = 0.0;
    if (spec_.response == ResponseModel::three_line) {
      const auto& r = spec_.three_line;
      y = r.base_load + r.cooling * std::max(0.0, temp - analytics::kCoolingBreak) +
          r.heating * std::max(0.0, analytics::kHeatingBreak - temp);
      if (r.noise_max > 0.0) y += r.noise_max * uniform(rng);
    } else {
      const double e = spec_.noise_sigma > 0.0 ? spec_.noise_sigma * gauss(rng) : 0.0;
      const bool weekend = is_weekend(date_of(t));
      if (k < p * kHoursPerDay) {
        y = (weekend ? profile->weekend[s] * spec_.weekend_activity_scale : profile->weekday[s]) + e;
      } else {
        y = weekend ? label.intercept_weekend[s] : label.intercept_weekday[s];
        for (std::size_t i = 0; i < p; ++i) y += label.alpha[s][i] * latent[k - (i + 1) * kHoursPerDay];
        const auto x = analytics::exogenous_transform(temp);
        for (int j = 0; j < 3; ++j) y += label.beta[s][static_cast<std::size_t>(j)] * x[j];
        y += e;
      }
    }
    latent[k] = std::max(0.0, y);
    series.consumption[k] = latent[k];
  }
  for (const auto& a : label.anomalies) {
    const auto first = hours_between(spec_.start, start_of(a.day));
    for (long h = std::max<long>(0, first); h < first + kHoursPerDay && h < static_cast<long>(n); ++h) {
      series.consumption[static_cast<std::size_t>(h)] *= a.factor;
    }
  }
  return series;
}

std::vector<core::HourlyReading> SyntheticGenerator::readings(std::size_t index) const {
  const auto s = series(index);
  std::vector<core::HourlyReading> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    out[k] = core::HourlyReading{s.meter_id, s.time_at(k), s.temperature[k], s.consumption[k], std::nullopt};
  }
  return out;
}

void SyntheticGenerator::for_each_reading(const std::function<void(const core::HourlyReading&)>& sink) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    for (const auto& r : readings(i)) sink(r);
  }
}

nlohmann::json SyntheticGenerator::labels_json() const {
  using json = nlohmann::json;
  using json_io::put_double;
  auto arr = [](auto&& values) {
    json a = json::array();
    for (double v : values) a.push_back(put_double(v));
    return a;
  };
  json series = json::array();
  for (const auto& l : labels_) {
    json seasons = json::array();
    for (std::size_t s = 0; s < kHoursPerDay; ++s) {
      seasons.push_back(json{{"season", s},
                             {"intercept_weekday", put_double(l.intercept_weekday[s])},
                             {"intercept_weekend", put_double(l.intercept_weekend[s])},
                             {"alpha", arr(l.alpha[s])},
                             {"beta", arr(l.beta[s])}});
    }
    json anomalies = json::array();
    for (const auto& a : l.anomalies) {
      anomalies.push_back(json{{"day", format_date(a.day)}, {"factor", put_double(a.factor)}});
    }
    json entry{{"meter_id", l.meter_id}, {"profile", l.profile}, {"response", to_string(l.response)},
               {"anomalies", anomalies}};
    if (l.response == ResponseModel::parx) {
      entry["seasons"] = seasons;
    } else {
      entry["three_line"] = json{{"base_load", put_double(l.three_line.base_load)},
                                 {"cooling", put_double(l.three_line.cooling)},
                                 {"heating", put_double(l.three_line.heating)},
                                 {"noise_max", put_double(l.three_line.noise_max)}};
    }
    series.push_back(std::move(entry));
  }
  const auto& tm = spec_.temperature;
  return json{{"format_version", 1},
              {"rng_seed", spec_.rng_seed},
              {"start", format_timestamp(spec_.start)},
              {"span_hours", spec_.span_hours},
              {"noise_sigma", put_double(spec_.noise_sigma)},
              {"temperature_model", json{{"mean_c", tm.mean_c},
                                         {"annual_amplitude_c", tm.annual_amplitude_c},
                                         {"diurnal_amplitude_c", tm.diurnal_amplitude_c},
                                         {"noise_sigma_c", tm.noise_sigma_c},
                                         {"warmest_day_of_year", tm.warmest_day_of_year},
                                         {"warmest_hour", tm.warmest_hour}}},
              {"series", series}};
}

}  // namespace smas::ingest
