#include "smas/workflow/stream.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>

#include "smas/analytics/day_grid.hpp"
#include "smas/error.hpp"

namespace smas::workflow {

void WindowSpec::validate() const {
  if (size.count() <= 0 || slide.count() <= 0) {
    throw Error(ErrorCode::invalid_argument, "window size and slide must be positive");
  }
  if (slide > size) throw Error(ErrorCode::invalid_argument, "window slide must not exceed its size");
  if (size.count() % 24 != 0 || slide.count() % 24 != 0) {
    throw Error(ErrorCode::invalid_argument, "detection windows use whole days");
  }
}

StreamProcessor::StreamProcessor(DetectorLookup detectors, WindowSpec window, core::ReadingStore* store)
    : detectors_(std::move(detectors)), window_(window), store_(store) {
  window_.validate();
  if (!detectors_) throw Error(ErrorCode::invalid_argument, "stream processor needs a detector lookup");
}

StreamProcessor::MeterState& StreamProcessor::state_for(const std::string& meter_id) {
  {
    std::shared_lock lock(map_mutex_);
    const auto it = meters_.find(meter_id);
    if (it != meters_.end()) return *it->second;
  }
  std::unique_lock lock(map_mutex_);
  auto& slot = meters_[meter_id];
  if (!slot) slot = std::make_unique<MeterState>();
  return *slot;
}

void StreamProcessor::initialise(const std::string& meter_id, MeterState& state, Date first_day) {
  state.initialised = true;
  state.detector = detectors_(meter_id);
  if (!state.detector) return;
  state.detection.emplace(state.detector, window_.size_days());
  const auto from = first_day - std::chrono::days{static_cast<long>(window_.size_days())};
  std::optional<analytics::DayGrid> grid;
  if (store_) {
    try {
      grid = analytics::make_day_grid(store_->query_series(meter_id, start_of(from), start_of(first_day)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::not_found) throw;
    }
  }
  for (std::size_t i = 0; i < window_.size_days(); ++i) {
    const Date d = from + std::chrono::days{static_cast<long>(i)};
    state.detection->seed(d, grid && i < grid->days() ? grid->load[i] : analytics::nan_day());
  }
}

std::optional<AnomalyReport> StreamProcessor::close_day(const std::string& meter_id, MeterState& state) {
  const Date day = *state.open_day;
  state.open_day.reset();
  if (store_ && !state.rows.empty()) store_->insert_readings(state.rows, core::DuplicatePolicy::upsert);
  state.rows.clear();
  ++days_closed_;
  ++state.closed_days;
  if (!state.detection) {
    ++unscored_;
    return std::nullopt;
  }
  const bool score = (state.closed_days - 1) % window_.slide_days() == 0;
  if (!score) {
    state.detection->seed(day, state.load);
    return std::nullopt;
  }
  if (observer_) {
    const auto& h = state.detection->history();
    observer_(meter_id, day, std::vector<DayValues>(h.begin(), h.end()));
  }
  const auto eps = epsilon_ ? epsilon_(meter_id) : std::nullopt;
  auto result = state.detection->process(day, state.load, state.temps, eps);
  ++reports_;
  return std::move(result.report);
}

std::vector<AnomalyReport> StreamProcessor::push_locked(MeterState& state, const core::HourlyReading& reading) {
  std::vector<AnomalyReport> out;
  if (!is_hour_aligned(reading.read_time) || !std::isfinite(reading.consumption) || reading.consumption < 0.0) {
    ++invalid_;
    return out;
  }
  if (state.last_time && reading.read_time <= *state.last_time) {
    ++late_;
    return out;
  }
  const Date day = date_of(reading.read_time);
  if (!state.initialised) initialise(reading.meter_id, state, day);
  if (state.open_day && *state.open_day != day) {
    if (auto r = close_day(reading.meter_id, state)) out.push_back(std::move(*r));
  }
  if (!state.open_day) {
    state.open_day = day;
    state.load = analytics::nan_day();
    state.temps = analytics::nan_day();
  }
  const auto h = static_cast<std::size_t>(hour_of_day(reading.read_time));
  state.load[h] = reading.consumption;
  if (reading.temperature) state.temps[h] = *reading.temperature;
  state.rows.push_back(reading);
  state.last_time = reading.read_time;
  ++accepted_;
  if (h + 1 == static_cast<std::size_t>(kHoursPerDay)) {
    if (auto r = close_day(reading.meter_id, state)) out.push_back(std::move(*r));
  }
  return out;
}

std::vector<AnomalyReport> StreamProcessor::push(const core::HourlyReading& reading) {
  auto& state = state_for(reading.meter_id);
  std::lock_guard lock(state.mutex);
  return push_locked(state, reading);
}

std::vector<AnomalyReport> StreamProcessor::push_batch(std::span<const core::HourlyReading> readings,
                                                       std::size_t threads) {
  std::map<std::string, std::vector<const core::HourlyReading*>> by_meter;
  for (const auto& r : readings) by_meter[r.meter_id].push_back(&r);
  std::vector<std::pair<MeterState*, const std::vector<const core::HourlyReading*>*>> work;
  work.reserve(by_meter.size());
  for (const auto& [id, rows] : by_meter) work.emplace_back(&state_for(id), &rows);

  std::vector<std::vector<AnomalyReport>> results(work.size());
  std::vector<std::exception_ptr> errors(work.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  {
    boost::asio::thread_pool pool(std::min(threads, std::max<std::size_t>(1, work.size())));
    for (std::size_t i = 0; i < work.size(); ++i) {
      boost::asio::post(pool, [&, i] {
        try {
          auto& [state, rows] = work[i];
          std::lock_guard lock(state->mutex);
          for (const auto* r : *rows) {
            auto reps = push_locked(*state, *r);
            std::move(reps.begin(), reps.end(), std::back_inserter(results[i]));
          }
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    pool.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<AnomalyReport> out;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(out));
  std::stable_sort(out.begin(), out.end(), [](const AnomalyReport& a, const AnomalyReport& b) {
    return a.day != b.day ? a.day < b.day : a.meter_id < b.meter_id;
  });
  return out;
}

std::vector<AnomalyReport> StreamProcessor::close_all() {
  std::vector<std::pair<std::string, MeterState*>> states;
  {
    std::shared_lock lock(map_mutex_);
    for (auto& [id, s] : meters_) states.emplace_back(id, s.get());
  }
  std::vector<AnomalyReport> out;
  for (auto& [id, s] : states) {
    std::lock_guard lock(s->mutex);
    if (!s->open_day) continue;
    if (auto r = close_day(id, *s)) out.push_back(std::move(*r));
  }
  return out;
}

StreamStats StreamProcessor::stats() const {
  return StreamStats{accepted_.load(), late_.load(), invalid_.load(),
                     days_closed_.load(), reports_.load(), unscored_.load()};
}

}  // namespace smas::workflow
