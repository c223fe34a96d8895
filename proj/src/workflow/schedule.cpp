#include "smas/workflow/schedule.hpp"

#include <array>
#include <chrono>

#include "smas/error.hpp"

namespace smas::workflow {

namespace {

constexpr std::array<std::pair<Interval, std::string_view>, 6> kIntervals{{
    {Interval::once, "once"},
    {Interval::minutely, "minutely"},
    {Interval::hourly, "hourly"},
    {Interval::daily, "daily"},
    {Interval::weekly, "weekly"},
    {Interval::monthly, "monthly"},
}};

std::chrono::seconds fixed_step(Interval interval) {
  switch (interval) {
    case Interval::minutely: return std::chrono::minutes{1};
    case Interval::hourly: return kHour;
    case Interval::daily: return kDay;
    case Interval::weekly: return 7 * kDay;
    default: return std::chrono::seconds{0};
  }
}

Timestamp add_months(Timestamp anchor, long months) {
  using namespace std::chrono;
  const auto day = floor<days>(anchor);
  const auto time_of_day = anchor - day;
  const year_month_day ymd{day};
  const auto ym = year_month{ymd.year(), ymd.month()} + std::chrono::months{months};
  const auto last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
  const auto d = ymd.day() > last ? last : ymd.day();
  return Timestamp{sys_days{year_month_day{ym.year(), ym.month(), d}}} + time_of_day;
}

}  // namespace

std::string_view to_string(Interval interval) noexcept {
  for (const auto& [v, name] : kIntervals) {
    if (v == interval) return name;
  }
  return "unknown";
}

Interval parse_interval(std::string_view text) {
  for (const auto& [v, name] : kIntervals) {
    if (name == text) return v;
  }
  throw Error(ErrorCode::invalid_argument, "unknown interval '" + std::string(text) +
                                               "' (expected once, minutely, hourly, daily, weekly or monthly)");
}

std::string_view to_string(ScheduleKind kind) noexcept {
  return kind == ScheduleKind::deterministic ? "deterministic" : "queued";
}

ScheduleKind parse_schedule_kind(std::string_view text) {
  if (text == "deterministic") return ScheduleKind::deterministic;
  if (text == "queued") return ScheduleKind::queued;
  throw Error(ErrorCode::invalid_argument,
              "unknown schedule kind '" + std::string(text) + "' (expected deterministic or queued)");
}

Timestamp occurrence(const Schedule& schedule, long k) {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "occurrence index must be non-negative");
  switch (schedule.interval) {
    case Interval::once:
      if (k != 0) throw Error(ErrorCode::invalid_argument, "a one-shot schedule has a single occurrence");
      return schedule.anchor;
    case Interval::monthly: return add_months(schedule.anchor, k);
    default: return schedule.anchor + k * fixed_step(schedule.interval);
  }
}

std::optional<Timestamp> next_occurrence_at_or_after(const Schedule& schedule, Timestamp t) {
  if (t <= schedule.anchor) return schedule.anchor;
  switch (schedule.interval) {
    case Interval::once: return std::nullopt;
    case Interval::monthly: {
      using namespace std::chrono;
      const year_month_day a{floor<days>(schedule.anchor)};
      const year_month_day b{floor<days>(t)};
      long k = (static_cast<int>(b.year()) - static_cast<int>(a.year())) * 12L +
               (static_cast<long>(static_cast<unsigned>(b.month())) - static_cast<long>(static_cast<unsigned>(a.month())));
      if (k < 0) k = 0;
      while (add_months(schedule.anchor, k) < t) ++k;
      return add_months(schedule.anchor, k);
    }
    default: {
      const auto step = fixed_step(schedule.interval);
      const auto elapsed = t - schedule.anchor;
      auto k = elapsed / step;
      if (schedule.anchor + k * step < t) ++k;
      return schedule.anchor + k * step;
    }
  }
}

std::optional<Timestamp> next_occurrence_after(const Schedule& schedule, Timestamp t) {
  return next_occurrence_at_or_after(schedule, t + std::chrono::seconds{1});
}

}  // namespace smas::workflow
