#include "smas/core/types.hpp"

#include <algorithm>
#include <limits>

#include "smas/error.hpp"

namespace smas::core {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

MeterSeries MeterSeries::slice(std::size_t first, std::size_t count) const {
  first = std::min(first, size());
  count = std::min(count, size() - first);
  MeterSeries out;
  out.meter_id = meter_id;
  out.start = time_at(first);
  const auto b = static_cast<std::ptrdiff_t>(first);
  const auto e = static_cast<std::ptrdiff_t>(first + count);
  out.consumption.assign(consumption.begin() + b, consumption.begin() + e);
  out.temperature.assign(temperature.begin() + b, temperature.begin() + e);
  out.temp_independent.assign(temp_independent.begin() + b, temp_independent.begin() + e);
  out.gap_mask.assign(gap_mask.begin() + b, gap_mask.begin() + e);
  return out;
}

MeterSeries MeterSeries::make(std::string meter_id, Timestamp start, std::size_t hours) {
  MeterSeries s;
  s.meter_id = std::move(meter_id);
  s.start = start;
  s.consumption.assign(hours, kNaN);
  s.temperature.assign(hours, kNaN);
  s.temp_independent.assign(hours, kNaN);
  s.gap_mask.assign(hours, false);
  return s;
}

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::hourly: return "hourly";
    case Granularity::daily: return "daily";
    case Granularity::weekly: return "weekly";
    case Granularity::monthly: return "monthly";
  }
  return "hourly";
}

std::string_view to_string(AggregateFn f) noexcept {
  switch (f) {
    case AggregateFn::sum: return "sum";
    case AggregateFn::avg: return "avg";
    case AggregateFn::min: return "min";
    case AggregateFn::max: return "max";
  }
  return "sum";
}

Granularity parse_granularity(std::string_view text) {
  for (auto g : {Granularity::hourly, Granularity::daily, Granularity::weekly, Granularity::monthly}) {
    if (text == to_string(g)) return g;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown granularity '" + std::string(text) + "'; expected one of hourly, daily, weekly, monthly");
}

AggregateFn parse_aggregate_fn(std::string_view text) {
  for (auto f : {AggregateFn::sum, AggregateFn::avg, AggregateFn::min, AggregateFn::max}) {
    if (text == to_string(f)) return f;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown aggregate function '" + std::string(text) + "'; expected one of sum, avg, min, max");
}

Timestamp bucket_start(Timestamp t, Granularity g) {
  using namespace std::chrono;
  switch (g) {
    case Granularity::hourly: return floor<hours>(t);
    case Granularity::daily: return start_of(date_of(t));
    case Granularity::weekly: {
      const Date d = date_of(t);
      const weekday wd{d};
      const auto since_monday = (wd - Monday).count();
      return start_of(d - days{since_monday});
    }
    case Granularity::monthly: {
      const year_month_day ymd{date_of(t)};
      return start_of(Date{ymd.year() / ymd.month() / 1});
    }
  }
  return t;
}

Timestamp next_bucket(Timestamp start, Granularity g) {
  using namespace std::chrono;
  switch (g) {
    case Granularity::hourly: return start + kHour;
    case Granularity::daily: return start + kDay;
    case Granularity::weekly: return start + 7 * kDay;
    case Granularity::monthly: {
      const year_month_day ymd{date_of(start)};
      const year_month next = ymd.year() / ymd.month() + months{1};
      return start_of(Date{next / 1});
    }
  }
  return start;
}

}  // namespace smas::core
