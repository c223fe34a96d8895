// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "smas/analytics/anomaly.hpp"
#include "smas/analytics/evaluation.hpp"
#include "smas/analytics/exogenous.hpp"
#include "smas/analytics/model_io.hpp"
#include "smas/analytics/parx.hpp"
#include "smas/analytics/three_line.hpp"
#include "smas/core/store.hpp"
#include "smas/json_io.hpp"
#include "smas/stats/descriptive.hpp"
#include "smas/stats/gaussian.hpp"
#include "smas/workflow/scheduler.hpp"
#include "smas/workflow/stream.hpp"

using namespace smas;
using namespace smas::analytics;
using Clock = std::chrono::steady_clock;

namespace tol {
constexpr double parx_coefficient = 0.05;
constexpr double parx_noise_free = 1e-6;
constexpr double parx_seconds = 60.0;
constexpr double exogenous_continuity_step = 1e-9;
constexpr double eval_win_fraction = 0.80;
constexpr double eval_seconds = 600.0;
constexpr double anomaly_recall = 0.95;
constexpr double anomaly_fpr = 0.05;
constexpr double three_line_relative = 0.10;
constexpr double three_line_base_kwh = 0.1;
constexpr double three_line_continuity = 1e-9;
constexpr double gaussian_mode = 1e-12;
constexpr double gaussian_integral = 1e-6;
constexpr std::size_t histogram_buckets = 10;
constexpr double throughput_seconds = 120.0;
}  // namespace tol

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------------ PARX

Outcome parx_recovery() {
  const std::size_t meters = 50;
  const auto t0 = Clock::now();
  double worst = 0.0, worst_noise_free = 0.0;
  std::size_t inactive = 0, unfitted = 0;
  for (double noise : {0.05, 0.0}) {
    ingest::SyntheticGenerator gen(fixtures::parx_spec(meters, 400, noise, noise > 0 ? 101 : 202));
    for (std::size_t i = 0; i < meters; ++i) {
      const auto model = parx_fit(gen.series(i));
      const auto& label = gen.labels()[i];
      for (std::size_t s = 0; s < kHoursPerDay; ++s) {
        const auto& fit = model.seasons[s];
        if (!fit.fitted) {
          ++unfitted;
          continue;
        }
        double miss = std::abs(fit.intercept - label.intercept_weekday[s]);
        for (std::size_t k = 0; k < label.alpha[s].size(); ++k) miss = std::max(miss, std::abs(fit.alpha[k] - label.alpha[s][k]));
        for (std::size_t k = 0; k < 3; ++k) {
          if (!fit.beta_active[k]) {
            ++inactive;
            continue;
          }
          miss = std::max(miss, std::abs(fit.beta[k] - label.beta[s][k]));
        }
        (noise > 0 ? worst : worst_noise_free) = std::max(noise > 0 ? worst : worst_noise_free, miss);
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = unfitted == 0 && inactive == 0 && worst <= tol::parx_coefficient &&
                    worst_noise_free <= tol::parx_noise_free && secs < tol::parx_seconds;
  return {pass, fmt("max |err| %.4f (<= %.2f), noise-free %.2e (<= %.0e), unfitted %zu, dropped drivers %zu, %.1f s (< %.0f)",
                    worst, tol::parx_coefficient, worst_noise_free, tol::parx_noise_free, unfitted, inactive, secs,
                    tol::parx_seconds)};
}

// ------------------------------------------------------------------ exogenous

Outcome exogenous_exactness() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> temp(-40.0, 50.0);
  std::size_t failures = 0;
  for (int i = 0; i < 100000; ++i) {
    const double t = temp(rng);
    const auto x = exogenous_transform(t);
    const double cooling = t > 20.0 ? t - 20.0 : 0.0;
    const double heating = t < 16.0 ? 16.0 - t : 0.0;
    const double overheating = t < 5.0 ? 5.0 - t : 0.0;
    if (x.xt1 != cooling || x.xt2 != heating || x.xt3 != overheating) ++failures;
  }
  const double h = tol::exogenous_continuity_step;
  std::size_t continuity_failures = 0;
  for (double b : {5.0, 16.0, 20.0}) {
    const auto at = exogenous_transform(b);
    const auto lo = exogenous_transform(b - h);
    const auto hi = exogenous_transform(b + h);
    for (int k = 0; k < 3; ++k) {
      if (std::abs(lo[k] - at[k]) > 2 * h || std::abs(hi[k] - at[k]) > 2 * h) ++continuity_failures;
    }
  }
  return {failures == 0 && continuity_failures == 0,
          fmt("1e5 samples, %zu definition failures, %zu continuity failures at 5/16/20", failures, continuity_failures)};
}

// ------------------------------------------------------------------ evaluation

Outcome evaluation_ordering() {
  const std::size_t meters = 200;
  ingest::GeneratorSpec spec;
  spec.n_series = meters;
  // Two years per meter, so the first quarter trains on six months.
  spec.span_hours = 730 * 24;
  spec.temperature = fixtures::wide_climate();
  spec.rng_seed = 4242;
  ingest::SyntheticGenerator gen(spec);
  std::vector<core::MeterSeries> series;
  for (std::size_t i = 0; i < meters; ++i) series.push_back(gen.series(i));
  const auto t0 = Clock::now();
  const auto r = evaluate_forecast_rmse(series);
  const double secs = seconds_since(t0);
  const double wins_avg = static_cast<double>(r.parx_wins_vs_averaging) / meters;
  const double wins_tl = static_cast<double>(r.parx_wins_vs_three_line) / meters;
  const bool pass = r.mean_rmse[0] < r.mean_rmse[1] && r.mean_rmse[0] < r.mean_rmse[2] &&
                    wins_avg > tol::eval_win_fraction && wins_tl > tol::eval_win_fraction && secs < tol::eval_seconds;
  return {pass, fmt("mean RMSE parx %.4f, averaging %.4f, three-line %.4f; wins %.0f%% / %.0f%% (> %.0f%%); %.1f s (< %.0f)",
                    r.mean_rmse[0], r.mean_rmse[1], r.mean_rmse[2], 100 * wins_avg, 100 * wins_tl,
                    100 * tol::eval_win_fraction, secs, tol::eval_seconds)};
}

// ------------------------------------------------------------------ anomaly detection

Outcome anomaly_detection() {
  const std::size_t meters = 100;
  ingest::GeneratorSpec spec;
  spec.n_series = meters;
  spec.span_hours = 365 * 24;
  spec.temperature = fixtures::wide_climate();
  spec.random_anomalies_per_series = 1;
  spec.anomaly_factor = 3.0;
  spec.anomaly_min_day = 190;
  spec.rng_seed = 777;
  ingest::SyntheticGenerator gen(spec);
  const std::array<double, 3> eps{0.001, 0.01, 0.1};
  std::size_t hits = 0, injected = 0, false_pos = 0, clean = 0, nesting = 0;
  for (std::size_t i = 0; i < meters; ++i) {
    const auto series = gen.series(i);
    AnomalyOptions opts;
    opts.training_days = 182;
    opts.epsilon = 0.01;
    const auto detector = std::make_shared<const AnomalyDetector>(train_detector(series, opts));
    const auto first = date_of(series.start) + std::chrono::days{182};
    const auto end = date_of(series.start) + std::chrono::days{365};
    std::set<Date> truth;
    for (const auto& a : gen.labels()[i].anomalies) truth.insert(a.day);
    std::array<std::set<Date>, 3> flagged;
    for (std::size_t e = 0; e < eps.size(); ++e) {
      for (const auto& r : replay_days(detector, series, first, end, 3, eps[e])) {
        if (r.flagged) flagged[e].insert(r.day);
        if (e != 1) continue;
        if (truth.contains(r.day)) {
          ++injected;
          hits += r.flagged ? 1 : 0;
        } else {
          ++clean;
          false_pos += r.flagged ? 1 : 0;
        }
      }
    }
    for (std::size_t e = 1; e < eps.size(); ++e) {
      for (const auto& d : flagged[e - 1]) nesting += flagged[e].contains(d) ? 0 : 1;
    }
  }
  const double recall = injected ? static_cast<double>(hits) / injected : 0.0;
  const double fpr = clean ? static_cast<double>(false_pos) / clean : 1.0;
  const bool pass = injected == meters && recall >= tol::anomaly_recall && fpr <= tol::anomaly_fpr && nesting == 0;
  return {pass, fmt("recall %.3f (>= %.2f) over %zu injected days, FPR %.4f (<= %.2f) over %zu clean days, %zu nesting violations",
                    recall, tol::anomaly_recall, injected, fpr, tol::anomaly_fpr, clean, nesting)};
}

// ------------------------------------------------------------------ three-line

Outcome three_line_recovery() {
  const std::size_t meters = 50;
  ingest::GeneratorSpec spec;
  spec.n_series = meters;
  spec.span_hours = 365 * 24;
  spec.response = ingest::ResponseModel::three_line;
  spec.temperature = fixtures::wide_climate();
  spec.rng_seed = 31;
  ingest::SyntheticGenerator gen(spec);
  const auto& truth = spec.three_line;
  double worst_cool = 0, worst_heat = 0, worst_base = 0, worst_gap = 0;
  std::size_t unavailable = 0;
  for (std::size_t i = 0; i < meters; ++i) {
    const auto m = three_line_fit(gen.series(i));
    if (!m.cooling_available || !m.heating_available) ++unavailable;
    worst_cool = std::max(worst_cool, std::abs(m.cooling_gradient - truth.cooling) / truth.cooling);
    worst_heat = std::max(worst_heat, std::abs(m.heating_gradient - truth.heating) / truth.heating);
    worst_base = std::max(worst_base, std::abs(m.base_load - truth.base_load));
    for (const auto* c : {&m.upper, &m.lower}) {
      const auto& [low, mid, high] = c->pieces;
      if (low.available && mid.available) worst_gap = std::max(worst_gap, std::abs(low.at(16.0) - mid.at(16.0)));
      if (mid.available && high.available) worst_gap = std::max(worst_gap, std::abs(mid.at(20.0) - high.at(20.0)));
    }
  }
  const bool pass = unavailable == 0 && worst_cool <= tol::three_line_relative && worst_heat <= tol::three_line_relative &&
                    worst_base <= tol::three_line_base_kwh && worst_gap <= tol::three_line_continuity;
  return {pass, fmt("cooling %.1f%%, heating %.1f%% (<= %.0f%%), base %.3f kWh (<= %.1f), breakpoint gap %.1e (<= %.0e)",
                    100 * worst_cool, 100 * worst_heat, 100 * tol::three_line_relative, worst_base,
                    tol::three_line_base_kwh, worst_gap, tol::three_line_continuity)};
}

// ------------------------------------------------------------------ Gaussian density

Outcome gaussian_density_checks() {
  double worst_mode = 0, worst_area = 0;
  for (const auto [mu, sd] : {std::pair{0.0, 1.0}, {3.5, 0.2}, {-2.0, 4.0}, {10.0, 0.05}}) {
    const stats::GaussianModel m{mu, sd * sd, 100};
    const double mode = 1.0 / (sd * std::sqrt(2.0 * std::numbers::pi));
    worst_mode = std::max(worst_mode, std::abs(stats::gaussian_density(m, mu) - mode));
    const int steps = 200000;
    const double lo = mu - 12 * sd, hi = mu + 12 * sd, h = (hi - lo) / steps;
    double area = 0.5 * (stats::gaussian_density(m, lo) + stats::gaussian_density(m, hi));
    for (int k = 1; k < steps; ++k) area += stats::gaussian_density(m, lo + k * h);
    worst_area = std::max(worst_area, std::abs(area * h - 1.0));
  }
  return {worst_mode <= tol::gaussian_mode && worst_area <= tol::gaussian_integral,
          fmt("mode error %.1e (<= %.0e), integral error %.1e (<= %.0e)", worst_mode, tol::gaussian_mode, worst_area,
              tol::gaussian_integral)};
}

// ------------------------------------------------------------------ histogram

Outcome histogram_conservation() {
  std::mt19937_64 rng(99);
  std::size_t failures = 0, values = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> x(1 + rng() % 500);
    switch (trial % 3) {
      case 0: {
        std::uniform_real_distribution<double> d(-5.0, 5.0);
        for (auto& v : x) v = d(rng);
        break;
      }
      case 1: {
        std::exponential_distribution<double> d(1.5);
        for (auto& v : x) v = d(rng);
        break;
      }
      default: {
        std::uniform_int_distribution<int> d(0, 3);
        for (auto& v : x) v = d(rng) * 0.25;
      }
    }
    values += x.size();
    const auto h = stats::equi_width_histogram(x);
    std::size_t sum = 0;
    for (auto c : h.counts) sum += c;
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    std::size_t expected_buckets = tol::histogram_buckets;
    bool equal_width = true;
    if (*mx > *mn) equal_width = std::abs(h.width() * tol::histogram_buckets - (*mx - *mn)) <= 1e-12 * (*mx - *mn + 1);
    if (sum != x.size() || h.counts.size() != expected_buckets || h.bucket_count != expected_buckets || !equal_width) {
      ++failures;
    }
  }
  return {failures == 0, fmt("10000 inputs (%zu values), %zu failures", values, failures)};
}

// ------------------------------------------------------------------ scheduler

Date add_months(Date d, int months) {
  using namespace std::chrono;
  const year_month_day ymd{d};
  const auto ym = year_month{ymd.year(), ymd.month()} + std::chrono::months{months};
  const auto last = year_month_day_last{ym.year(), month_day_last{ym.month()}}.day();
  return sys_days{year_month_day{ym.year(), ym.month(), std::min(ymd.day(), last)}};
}

Outcome scheduler_suite() {
  using namespace workflow;
  const auto start = parse_timestamp("2014-01-01T00:00:00Z");
  const auto end = start + std::chrono::days{90};
  ManualExecutor exec;
  Scheduler sched(exec);
  std::mt19937_64 rng(5);

  const auto make = [](const std::string& name, Schedule s) {
    Workflow w;
    w.name = name;
    w.schedule = std::move(s);
    w.worklets = {Worklet{"step", WorkletKind::transform, json::object(),
                          [](const WorkletContext& ctx) { return WorkletOutput{ctx.input, ""}; }}};
    return w;
  };
  struct Det {
    std::string name;
    Interval interval;
    Timestamp anchor;
  };
  const std::vector<Det> det{
      {"every-minute", Interval::minutely, start + std::chrono::minutes{15}},
      {"hourly", Interval::hourly, start + std::chrono::minutes{20}},
      {"daily", Interval::daily, start + std::chrono::hours{2}},
      {"weekly", Interval::weekly, parse_timestamp("2014-01-06T03:30:00Z")},
      {"monthly-31st", Interval::monthly, parse_timestamp("2014-01-31T04:00:00Z")},
      {"once", Interval::once, parse_timestamp("2014-02-14T12:00:00Z")},
  };
  for (const auto& d : det) sched.register_workflow(make(d.name, Schedule::deterministic(d.interval, d.anchor)), start);
  std::map<std::string, std::string> class_of;
  for (int i = 0; i < 6; ++i) {
    const auto name = "queued-" + std::to_string(i);
    const auto cls = i < 4 ? "etl" : "reports";
    class_of[name] = cls;
    sched.register_workflow(
        make(name, Schedule::queued(i % 2 ? Interval::hourly : Interval::daily, start + std::chrono::minutes{7 * i}, cls)),
        start);
  }

  std::map<std::string, std::size_t> running;
  std::size_t singleton_violations = 0;
  std::map<std::string, std::vector<std::string>> started;
  sched.set_observer([&](const RunEvent& e) {
    if (e.kind != ScheduleKind::queued) return;
    const auto& cls = class_of.at(e.workflow);
    if (e.type == RunEventType::started) {
      if (++running[cls] > 1) ++singleton_violations;
      started[cls].push_back(e.run_id);
    } else {
      --running[cls];
    }
  });

  // Enqueue order as seen from outside: new queue tails after each step.
  std::map<std::string, std::vector<std::string>> enqueued;
  std::map<std::string, std::set<std::string>> seen;
  const auto observe_queues = [&] {
    for (const auto* cls : {"etl", "reports"}) {
      for (const auto& job : sched.queue(cls)) {
        if (seen[cls].insert(job.run_id).second) enqueued[cls].push_back(job.run_id);
      }
    }
  };

  // One tick per minute, the finest interval.
  for (auto now = start; now < end; now += std::chrono::minutes{1}) {
    if (rng() % 50 == 0) {
      (void)sched.enqueue("queued-" + std::to_string(rng() % 6), now);
      observe_queues();
    }
    // A job enqueued and started within one tick never shows in the queue.
    for (const auto& s : sched.tick(now)) {
      if (s.kind == ScheduleKind::queued && seen[class_of.at(s.workflow)].insert(s.run_id).second) {
        enqueued[class_of.at(s.workflow)].push_back(s.run_id);
      }
    }
    observe_queues();
    for (int k = static_cast<int>(rng() % 4); k > 0; --k) exec.run_next();
  }
  exec.run_all();
  observe_queues();

  // Deterministic: exactly the expected occurrences inside the horizon, each once.
  std::map<std::string, std::vector<Timestamp>> got;
  for (const auto& r : sched.completed()) {
    if (r.kind == ScheduleKind::deterministic) got[r.workflow].push_back(r.scheduled_for);
  }
  std::size_t period_violations = 0, deterministic_runs = 0;
  for (const auto& d : det) {
    std::vector<Timestamp> expected;
    for (long k = 0;; ++k) {
      Timestamp t{};
      switch (d.interval) {
        case Interval::once: t = k == 0 ? d.anchor : end; break;
        case Interval::minutely: t = d.anchor + std::chrono::minutes{k}; break;
        case Interval::hourly: t = d.anchor + std::chrono::hours{k}; break;
        case Interval::daily: t = d.anchor + std::chrono::days{k}; break;
        case Interval::weekly: t = d.anchor + std::chrono::weeks{k}; break;
        case Interval::monthly:
          t = start_of(add_months(date_of(d.anchor), static_cast<int>(k))) + (d.anchor - start_of(date_of(d.anchor)));
          break;
      }
      if (t >= end) break;
      expected.push_back(t);
    }
    auto g = got[d.name];
    std::sort(g.begin(), g.end());
    deterministic_runs += g.size();
    if (g != expected) ++period_violations;
  }

  // FIFO: per class, starts follow enqueue order.
  std::size_t fifo_violations = 0, queued_runs = 0;
  for (const auto& [cls, order] : started) {
    queued_runs += order.size();
    const auto& q = enqueued[cls];
    if (order.size() != q.size() || !std::equal(order.begin(), order.end(), q.begin())) ++fifo_violations;
  }
  const bool pass = period_violations == 0 && fifo_violations == 0 && singleton_violations == 0 &&
                    sched.max_queued_concurrency() <= 1 && queued_runs > 0;
  return {pass, fmt("90 days at 1-minute ticks: %zu deterministic runs, %zu queued runs; period violations %zu, FIFO "
                    "violations %zu, singleton violations %zu",
                    deterministic_runs, queued_runs, period_violations, fifo_violations, singleton_violations)};
}

// ------------------------------------------------------------------ streaming

struct StreamSetup {
  std::vector<core::MeterSeries> series;
  std::map<std::string, std::shared_ptr<const AnomalyDetector>> detectors;
  std::vector<std::vector<core::HourlyReading>> priming;  ///< last 3 training days per meter
  std::vector<core::HourlyReading> stream;                 ///< hour-major
  Date stream_from{};

  workflow::DetectorLookup lookup() const {
    return [this](const std::string& id) -> std::shared_ptr<const AnomalyDetector> {
      const auto it = detectors.find(id);
      return it == detectors.end() ? nullptr : it->second;
    };
  }
};

StreamSetup stream_setup(std::size_t meters, std::size_t stream_days, std::uint64_t seed, bool keep_series) {
  const std::size_t train = 182;
  ingest::GeneratorSpec spec;
  spec.n_series = meters;
  spec.span_hours = (train + stream_days) * 24;
  spec.temperature = fixtures::wide_climate();
  spec.random_anomalies_per_series = stream_days >= 10 ? 1 : 0;
  spec.anomaly_min_day = train;
  spec.rng_seed = seed;
  ingest::SyntheticGenerator gen(spec);
  StreamSetup s;
  std::vector<std::vector<core::HourlyReading>> tails;
  for (std::size_t i = 0; i < meters; ++i) {
    auto series = gen.series(i);
    s.detectors[series.meter_id] = std::make_shared<const AnomalyDetector>(train_detector(series));
    const auto rows = gen.readings(i);
    s.priming.emplace_back(rows.begin() + (train - 3) * 24, rows.begin() + train * 24);
    tails.emplace_back(rows.begin() + train * 24, rows.end());
    if (i == 0) s.stream_from = date_of(series.start) + std::chrono::days{static_cast<long>(train)};
    if (keep_series) s.series.push_back(std::move(series));
  }
  for (std::size_t h = 0; h < stream_days * 24; ++h) {
    for (const auto& t : tails) s.stream.push_back(t[h]);
  }
  return s;
}

std::string canonical(const std::vector<AnomalyReport>& reports) {
  std::vector<std::string> lines;
  for (const auto& r : reports) lines.push_back(json_io::dump(to_json(r)));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

Outcome stream_batch_equivalence() {
  const std::size_t days = 60;
  const auto s = stream_setup(20, days, 606, true);
  std::vector<AnomalyReport> batch;
  for (const auto& series : s.series) {
    const auto r = replay_days(s.detectors.at(series.meter_id), series, s.stream_from,
                               s.stream_from + std::chrono::days{static_cast<long>(days)});
    batch.insert(batch.end(), r.begin(), r.end());
  }
  const auto run = [&](bool parallel) {
    core::ReadingStore store;
    for (const auto& p : s.priming) store.insert_readings(p);
    workflow::StreamProcessor proc(s.lookup(), workflow::WindowSpec{}, &store);
    std::vector<AnomalyReport> out;
    if (parallel) {
      out = proc.push_batch(s.stream, 4);
    } else {
      for (const auto& r : s.stream) {
        auto got = proc.push(r);
        out.insert(out.end(), got.begin(), got.end());
      }
    }
    auto rest = proc.close_all();
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
  };
  const auto expected = canonical(batch);
  const auto sequential = run(false);
  const auto parallel = run(true);
  const auto flagged = std::count_if(batch.begin(), batch.end(), [](const AnomalyReport& r) { return r.flagged; });
  const bool pass = batch.size() == 20 * days && canonical(sequential) == expected && canonical(parallel) == expected;
  return {pass, fmt("%zu batch reports (%ld flagged); stream %s, parallel stream %s", batch.size(), flagged,
                    canonical(sequential) == expected ? "identical" : "DIFFERENT",
                    canonical(parallel) == expected ? "identical" : "DIFFERENT")};
}

Outcome stream_throughput() {
  const std::size_t meters = 5000;
  const auto setup_start = Clock::now();
  const auto s = stream_setup(meters, 1, 5005, false);
  const double setup_secs = seconds_since(setup_start);
  core::ReadingStore store;
  for (const auto& p : s.priming) store.insert_readings(p);
  workflow::StreamProcessor proc(s.lookup(), workflow::WindowSpec{}, &store);
  const auto t0 = Clock::now();
  std::size_t reports = 0;
  for (const auto& r : s.stream) reports += proc.push(r).size();
  reports += proc.close_all().size();
  const double secs = seconds_since(t0);
  return {reports == meters && secs < tol::throughput_seconds,
          fmt("%zu readings -> %zu reports in %.2f s (< %.0f); detector training %.1f s not counted", s.stream.size(),
              reports, secs, tol::throughput_seconds, setup_secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"parx_coefficient_recovery", parx_recovery},
      {"exogenous_transform_exactness", exogenous_exactness},
      {"forecast_rmse_ordering", evaluation_ordering},
      {"anomaly_detection", anomaly_detection},
      {"three_line_recovery", three_line_recovery},
      {"gaussian_density", gaussian_density_checks},
      {"histogram_conservation", histogram_conservation},
      {"scheduler_simulated_clock", scheduler_suite},
      {"stream_batch_equivalence", stream_batch_equivalence},
      {"stream_throughput", stream_throughput},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %-30s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  const double bytes = static_cast<double>(core::kRecordBytes) * 24 * 730;
  std::printf("INFO storage_density                 %.0f bytes per two-year hourly series on disk; 1 GB holds %.0f series\n",
              bytes, 1e9 / bytes);
  return failed == 0 ? 0 : 1;
}
