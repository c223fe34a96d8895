#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "smas/analytics/anomaly.hpp"
#include "smas/analytics/disaggregate.hpp"
#include "smas/analytics/evaluation.hpp"
#include "smas/analytics/features.hpp"
#include "smas/analytics/forecast.hpp"
#include "smas/analytics/model_io.hpp"
#include "smas/analytics/profile.hpp"
#include "smas/analytics/registry.hpp"
#include "smas/analytics/three_line.hpp"
#include "smas/api/service.hpp"
#include "smas/error.hpp"
#include "smas/ingest/csv.hpp"
#include "smas/ingest/generator.hpp"
#include "smas/json_io.hpp"
#include "smas/stats/descriptive.hpp"
#include "smas/workflow/config.hpp"
#include "smas/workflow/pipeline.hpp"
#include "smas/workflow/scheduler.hpp"

namespace fs = std::filesystem;
using namespace smas;
using nlohmann::json;

namespace {

/// Rows of scalar cells under fixed column names.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add(std::vector<json> row) { rows.push_back(std::move(row)); }
};

std::string tsv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

/// JSON: one object keyed by table name, each an array of row objects.
/// TSV: per table a `# name` line, a header line and the rows.
void emit(const std::vector<Table>& tables, const std::string& format) {
  if (format == "json") {
    json doc = json::object();
    for (const auto& t : tables) {
      json rows = json::array();
      for (const auto& r : t.rows) {
        json row = json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c) row[t.columns[c]] = r[c];
        rows.push_back(std::move(row));
      }
      doc[t.name] = std::move(rows);
    }
    std::cout << json_io::dump(doc) << '\n';
    return;
  }
  for (const auto& t : tables) {
    std::cout << "# " << t.name << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c) std::cout << (c ? "\t" : "") << t.columns[c];
    std::cout << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t c = 0; c < r.size(); ++c) std::cout << (c ? "\t" : "") << tsv_cell(r[c]);
      std::cout << '\n';
    }
  }
}

json num(double v) { return json_io::put_double(v); }

/// Files under the data directory.
struct DataDir {
  fs::path root;

  fs::path store() const { return root / "store"; }
  fs::path models() const { return root / "models"; }
  fs::path anomalies() const { return root / "anomalies.jsonl"; }
  fs::path thresholds() const { return root / "thresholds.json"; }
  fs::path outbox() const { return root / "outbox.jsonl"; }
  fs::path runs() const { return root / "runs.jsonl"; }
  fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : root / p; }
};

std::vector<std::string> selected_meters(const core::ReadingStore& store, const std::vector<std::string>& wanted) {
  auto ids = wanted.empty() ? store.meter_ids() : wanted;
  if (ids.empty()) throw Error(ErrorCode::not_found, "no meters in the data directory (run ingest or generate first)");
  for (const auto& id : ids) {
    if (store.row_count(id) == 0) throw Error(ErrorCode::not_found, "unknown meter '" + id + "'");
  }
  return ids;
}

Timestamp parse_when(const std::string& text) {
  return text.size() == 10 ? start_of(parse_date(text)) : parse_timestamp(text);
}

/// "90s", "15m", "1h", "1d" or plain seconds.
std::chrono::seconds parse_step(const std::string& text) {
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "bad duration '" + text + "'");
  }
  const auto unit = text.substr(used);
  long long scale = 0;
  if (unit.empty() || unit == "s") scale = 1;
  else if (unit == "m") scale = 60;
  else if (unit == "h") scale = 3600;
  else if (unit == "d") scale = 86400;
  if (scale == 0 || n <= 0) throw Error(ErrorCode::invalid_argument, "bad duration '" + text + "' (e.g. 30s, 15m, 1h, 1d)");
  return std::chrono::seconds{n * scale};
}

// ---------------------------------------------------------------- commands

struct Globals {
  std::string data_dir = ".";
  std::string format = "tsv";
};

struct IngestArgs {
  std::string meters;
  std::string weather;
  std::string customers;
  bool skip_malformed = false;
  bool upsert = false;
};

int cmd_ingest(const Globals& g, const IngestArgs& a) {
  const DataDir d{g.data_dir};
  ingest::ParseOptions opts;
  opts.skip_malformed = a.skip_malformed;
  auto parsed = ingest::parse_meter_csv(d.resolve(a.meters), opts);
  std::vector<std::string> warnings;
  if (!a.weather.empty()) {
    const auto weather = ingest::parse_weather_csv(d.resolve(a.weather), opts);
    warnings = weather.warnings;
    parsed.readings = ingest::join_weather(parsed.readings, weather.points);
  }
  core::ReadingStore store(d.store());
  const auto inserted = store.insert_readings(
      parsed.readings, a.upsert ? core::DuplicatePolicy::upsert : core::DuplicatePolicy::reject);
  if (!a.customers.empty()) {
    std::ifstream in(d.resolve(a.customers));
    if (!in) throw Error(ErrorCode::io, "cannot open " + a.customers);
    const auto doc = json::parse(in, nullptr, false);
    if (!doc.is_array()) throw Error(ErrorCode::parse, a.customers + ": expected an array of customer records");
    for (const auto& c : doc) {
      store.upsert_customer({c.at("meter_id").get<std::string>(), c.value("feed_area_id", std::string{}),
                             c.value("neighborhood_id", std::string{}), c.value("anonymized", false)});
    }
  }
  store.flush();
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& s : parsed.skipped) std::cerr << "skipped line " << s.line << ": " << s.message << '\n';
  Table t{"ingest", {"rows", "skipped", "meters"}, {}};
  t.add({inserted, parsed.skipped.size(), store.meter_ids().size()});
  emit({t}, g.format);
  return 0;
}

struct GenerateArgs {
  std::size_t series = 10;
  std::size_t days = 365;
  std::uint64_t seed = 1;
  double noise = 0.05;
  double weekend_scale = 1.0;
  std::size_t anomalies = 0;
  std::size_t anomaly_min_day = 0;
  std::string response = "parx";
  std::string start = "2014-01-01";
  std::string prefix = "meter";
  std::size_t neighborhood_size = 0;
  std::string csv;
};

int cmd_generate(const Globals& g, const GenerateArgs& a) {
  const DataDir d{g.data_dir};
  ingest::GeneratorSpec spec;
  spec.n_series = a.series;
  spec.span_hours = a.days * 24;
  spec.rng_seed = a.seed;
  spec.noise_sigma = a.noise;
  spec.weekend_activity_scale = a.weekend_scale;
  spec.random_anomalies_per_series = a.anomalies;
  spec.anomaly_min_day = a.anomaly_min_day;
  spec.start = parse_when(a.start);
  spec.id_prefix = a.prefix;
  if (a.response == "three_line") spec.response = ingest::ResponseModel::three_line;
  else if (a.response != "parx") throw Error(ErrorCode::invalid_argument, "response must be parx or three_line");
  const ingest::SyntheticGenerator gen(spec);

  fs::create_directories(d.root);
  if (!a.csv.empty()) {
    const auto dir = d.resolve(a.csv);
    fs::create_directories(dir);
    std::ofstream meters(dir / "meters.csv");
    std::ofstream weather(dir / "weather.csv");
    for (std::size_t i = 0; i < spec.n_series; ++i) {
      const auto rows = gen.readings(i);
      if (i == 0) ingest::write_meter_csv(meters, rows);
      else {
        std::ostringstream body;
        ingest::write_meter_csv(body, rows);
        const auto s = body.str();
        meters << s.substr(s.find('\n') + 1);
      }
    }
    ingest::write_weather_csv(weather, gen.weather());
    if (!meters || !weather) throw Error(ErrorCode::io, "cannot write " + dir.string());
  } else {
    core::ReadingStore store(d.store());
    for (std::size_t i = 0; i < spec.n_series; ++i) {
      const auto rows = gen.readings(i);
      store.insert_readings(rows);
      if (a.neighborhood_size > 0) {
        const auto hood = "hood-" + std::to_string(i / a.neighborhood_size);
        store.upsert_customer({rows.front().meter_id, "area-1", hood, false});
      }
    }
    store.flush();
  }
  std::ofstream labels(d.root / "labels.json");
  labels << json_io::dump(gen.labels_json()) << '\n';
  if (!labels) throw Error(ErrorCode::io, "cannot write labels.json");
  Table t{"generate", {"series", "hours_per_series", "seed"}, {}};
  t.add({spec.n_series, spec.span_hours, spec.rng_seed});
  emit({t}, g.format);
  return 0;
}

struct FitArgs {
  std::size_t order_p = 3;
  std::size_t training_days = 182;
  std::vector<std::string> meters;
};

int cmd_fit(const Globals& g, const FitArgs& a) {
  const DataDir d{g.data_dir};
  core::ReadingStore store(d.store());
  analytics::ModelRegistry registry(d.models());
  workflow::FitOptions opts;
  opts.order_p = a.order_p;
  opts.anomaly.order_p = a.order_p;
  opts.anomaly.training_days = a.training_days;
  opts.meters = selected_meters(store, a.meters);
  const auto s = workflow::fit_all_models(store, registry, opts);
  registry.save();
  store.flush();
  for (const auto& [meter, why] : s.failures) std::cerr << "warning: " << meter << ": " << why << '\n';
  Table t{"fit", {"meters", "parx", "three_line", "profiles", "detectors", "failures"}, {}};
  t.add({s.meters, s.parx, s.three_line, s.profiles, s.detectors, s.failures.size()});
  emit({t}, g.format);
  return 0;
}

struct MeterArgs {
  std::string meter;
};

int cmd_disaggregate(const Globals& g, const MeterArgs& a) {
  const DataDir d{g.data_dir};
  core::ReadingStore store(d.store());
  analytics::ModelRegistry registry(d.models());
  (void)selected_meters(store, {a.meter});
  const auto parx = registry.models(a.meter).parx;
  if (!parx) throw Error(ErrorCode::dependency, "model not built for meter '" + a.meter + "' (run fit first)");
  const auto series = store.query_all(a.meter);
  const auto dis = analytics::disaggregate(*parx, series);
  analytics::store_disaggregation(store, dis);
  store.flush();
  Table t{"disaggregation", {"time", "observed", "temp_dependent", "temp_independent"}, {}};
  for (std::size_t i = 0; i < series.size(); ++i) {
    t.add({format_timestamp(series.time_at(i)), num(series.consumption[i]), num(dis.temp_dependent[i]),
           num(dis.temp_independent[i])});
  }
  Table s{"summary", {"meter_id", "available_hours", "mean_temp_independent"}, {}};
  s.add({a.meter, dis.available_hours(), num(dis.available_hours() ? dis.mean_temp_independent() : NAN)});
  emit({s, t}, g.format);
  return 0;
}

int cmd_profile(const Globals& g, const MeterArgs& a) {
  const DataDir d{g.data_dir};
  core::ReadingStore store(d.store());
  (void)selected_meters(store, {a.meter});
  const auto series = store.query_all(a.meter);
  const auto profile = analytics::daily_profile(series.start, series.consumption, {}, a.meter);
  std::vector<double> hours;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.gap_mask[i]) hours.push_back(series.consumption[i]);
  }
  Table p{"profile", {"hour", "weekday", "weekend"}, {}};
  for (std::size_t h = 0; h < kHoursPerDay; ++h) p.add({h, num(profile.weekday[h]), num(profile.weekend[h])});
  Table tl{"three_line", {"base_load", "heating_gradient", "cooling_gradient", "heating_available", "cooling_available"}, {}};
  try {
    const auto t = analytics::three_line_fit(series);
    tl.add({num(t.base_load), num(t.heating_gradient), num(t.cooling_gradient), t.heating_available,
            t.cooling_available});
  } catch (const Error& e) {
    std::cerr << "warning: three-line fit: " << e.what() << '\n';
  }
  Table hist{"histogram", {"lo", "hi", "count"}, {}};
  if (!hours.empty()) {
    const auto h = stats::equi_width_histogram(hours);
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      const double lo = h.lo + static_cast<double>(b) * h.width();
      hist.add({num(lo), num(lo + h.width()), h.counts[b]});
    }
  }
  emit({p, tl, hist}, g.format);
  return 0;
}

struct SegmentArgs {
  std::size_t k = 3;
  std::vector<std::string> features;
  std::uint64_t seed = 42;
};

int cmd_segment(const Globals& g, const SegmentArgs& a) {
  const DataDir d{g.data_dir};
  analytics::ModelRegistry registry(d.models());
  analytics::FeatureSelection sel;
  if (!a.features.empty()) {
    sel = analytics::FeatureSelection{false, false, false, false, false};
    for (const auto& f : a.features) {
      if (f == "base_load") sel.base_load = true;
      else if (f == "activity_load") sel.activity_load = true;
      else if (f == "heating_gradient") sel.heating_gradient = true;
      else if (f == "cooling_gradient") sel.cooling_gradient = true;
      else if (f == "weekday_profile") sel.weekday_profile = true;
      else throw Error(ErrorCode::invalid_argument, "unknown feature '" + f + "'");
    }
  }
  std::vector<analytics::CustomerFeatures> features;
  for (const auto& id : registry.meter_ids()) {
    try {
      features.push_back(analytics::extract_features(id, registry.models(id)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::dependency) throw;
      std::cerr << "skipped " << id << ": " << e.what() << '\n';
    }
  }
  if (features.empty()) throw Error(ErrorCode::not_found, "no fitted meters (run fit first)");
  const auto seg = analytics::segment_customers(features, a.k, sel, a.seed);
  Table members{"members", {"meter_id", "cluster"}, {}};
  for (std::size_t i = 0; i < seg.meter_ids.size(); ++i) members.add({seg.meter_ids[i], seg.clustering.assignments[i]});
  Table centroids{"centroids", {"cluster", "size"}, {}};
  for (const auto& n : seg.feature_names) centroids.columns.push_back(n);
  for (std::size_t c = 0; c < a.k; ++c) {
    std::vector<json> row{c, seg.cluster_sizes[c]};
    for (Eigen::Index j = 0; j < seg.centroids.cols(); ++j) row.push_back(num(seg.centroids(static_cast<Eigen::Index>(c), j)));
    centroids.add(std::move(row));
  }
  emit({centroids, members}, g.format);
  return 0;
}

struct ForecastArgs {
  std::string meter;
  std::string method = "averaging";
  std::size_t horizon = 24;
  std::string granularity = "hourly";
};

int cmd_forecast(const Globals& g, const ForecastArgs& a) {
  const DataDir d{g.data_dir};
  core::ReadingStore store(d.store());
  (void)selected_meters(store, {a.meter});
  const auto method = analytics::parse_forecast_method(a.method);
  std::optional<analytics::ParxModel> parx;
  if (method == analytics::ForecastMethod::parx) {
    analytics::ModelRegistry registry(d.models());
    parx = registry.models(a.meter).parx;
    if (!parx) throw Error(ErrorCode::dependency, "model not built for meter '" + a.meter + "' (run fit first)");
  }
  const auto f = analytics::forecast(method, store.query_all(a.meter), core::parse_granularity(a.granularity),
                                     a.horizon, parx ? &*parx : nullptr);
  Table t{"forecast", {"start", "value"}, {}};
  for (const auto& b : f.buckets) t.add({format_timestamp(b.start), num(b.value)});
  emit({t}, g.format);
  return 0;
}

struct DetectArgs {
  std::size_t train_days = 182;
  std::vector<double> epsilons{0.01};
  std::string from;
  std::string to;
  std::vector<std::string> meters;
  bool weekday_split = false;
  bool record = false;
};

int cmd_detect(const Globals& g, const DetectArgs& a) {
  const DataDir d{g.data_dir};
  core::ReadingStore store(d.store());
  const auto ids = selected_meters(store, a.meters);
  for (double e : a.epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::validation, "epsilon must lie in (0, 1)");
  }
  analytics::AnomalyOptions opts;
  opts.training_days = a.train_days;
  opts.epsilon = a.epsilons.front();
  opts.weekday_split = a.weekday_split;

  // day -> (scored, flagged per epsilon)
  std::map<Date, std::pair<std::size_t, std::vector<std::size_t>>> days;
  std::vector<analytics::AnomalyReport> recorded;
  for (const auto& id : ids) {
    const auto series = store.query_all(id);
    const auto detector = std::make_shared<const analytics::AnomalyDetector>(analytics::train_detector(series, opts));
    const auto first = date_of(series.start);
    const auto from = a.from.empty() ? first + std::chrono::days{static_cast<long>(a.train_days)} : parse_date(a.from);
    const auto to = a.to.empty() ? date_of(series.end() - std::chrono::hours{1}) + std::chrono::days{1} : parse_date(a.to);
    for (std::size_t e = 0; e < a.epsilons.size(); ++e) {
      const auto reports = analytics::replay_days(detector, series, from, to, 3, a.epsilons[e]);
      for (const auto& r : reports) {
        auto& slot = days[r.day];
        slot.second.resize(a.epsilons.size());
        if (e == 0) ++slot.first;
        if (r.flagged) ++slot.second[e];
      }
      if (e == 0 && a.record) recorded.insert(recorded.end(), reports.begin(), reports.end());
    }
  }
  if (a.record) analytics::AnomalyLog(d.anomalies()).append(recorded);
  Table t{"daily_counts", {"day", "weekend", "scored"}, {}};
  for (double e : a.epsilons) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "flagged_eps_%g", e);
    t.columns.emplace_back(buf);
  }
  for (const auto& [day, v] : days) {
    std::vector<json> row{format_date(day), is_weekend(day), v.first};
    for (auto c : v.second) row.push_back(c);
    t.add(std::move(row));
  }
  emit({t}, g.format);
  return 0;
}

struct EvaluateArgs {
  double train_fraction = 0.25;
  std::size_t refit_every = 1;
  std::size_t order_p = 3;
  std::vector<std::string> meters;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
  const DataDir d{g.data_dir};
  if (!fs::exists(d.store())) throw Error(ErrorCode::not_found, "no store under " + d.root.string() + " (run ingest or generate first)");
  core::ReadingStore store(d.store());
  std::vector<core::MeterSeries> series;
  for (const auto& id : selected_meters(store, a.meters)) series.push_back(store.query_all(id));
  analytics::EvaluationOptions opts;
  opts.train_fraction = a.train_fraction;
  opts.refit_every_days = a.refit_every;
  opts.order_p = a.order_p;
  const auto r = analytics::evaluate_forecast_rmse(series, opts);
  Table summary{"summary", {"method", "mean_rmse", "parx_wins"}, {}};
  summary.add({"parx", num(r.mean_rmse[0]), nullptr});
  summary.add({"averaging", num(r.mean_rmse[1]), r.parx_wins_vs_averaging});
  summary.add({"three_line", num(r.mean_rmse[2]), r.parx_wins_vs_three_line});
  Table per{"meters", {"meter_id", "parx", "averaging", "three_line", "train_days", "test_days"}, {}};
  for (const auto& m : r.meters) {
    per.add({m.meter_id, num(m.rmse[0]), num(m.rmse[1]), num(m.rmse[2]), m.train_days, m.test_days});
  }
  emit({summary, per}, g.format);
  return 0;
}

std::atomic<bool> g_stop{false};

struct RunArgs {
  std::string config = "workflows.json";
  std::vector<std::string> simulated_clock;
  double duration_s = 0.0;
  std::size_t threads = 0;
};

int cmd_run_workflows(const Globals& g, const RunArgs& a) {
  const DataDir d{g.data_dir};
  core::ReadingStore store(d.store());
  analytics::ModelRegistry registry(d.models());
  analytics::AnomalyLog anomalies(d.anomalies());
  api::ThresholdStore thresholds(d.thresholds());
  api::FileOutbox outbox(d.outbox());
  api::FeedbackEngine feedback(store, registry, outbox);
  const auto catalog = workflow::builtin_worklets({&store, &registry, &anomalies, &thresholds, &feedback, d.root});
  const auto workflows = workflow::load_workflows(d.resolve(a.config), catalog);

  workflow::RunLog log(d.runs());
  std::unique_ptr<workflow::Executor> executor;
  if (a.threads > 0) executor = std::make_unique<workflow::ThreadPoolExecutor>(a.threads);
  else executor = std::make_unique<workflow::InlineExecutor>();
  workflow::Scheduler scheduler(*executor, &log);

  if (!a.simulated_clock.empty()) {
    const auto& span = a.simulated_clock[0];
    const auto dots = span.find("..");
    if (dots == std::string::npos) throw Error(ErrorCode::invalid_argument, "--simulated-clock expects start..end");
    const auto start = parse_when(span.substr(0, dots));
    const auto end = parse_when(span.substr(dots + 2));
    const auto step = parse_step(a.simulated_clock.size() > 1 ? a.simulated_clock[1] : "1h");
    if (end < start) throw Error(ErrorCode::invalid_argument, "simulated clock ends before it starts");
    for (const auto& wf : workflows) scheduler.register_workflow(wf, start);
    for (auto now = start; now <= end; now += step) {
      (void)scheduler.tick(now);
      scheduler.wait_idle();
    }
  } else {
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    const auto begin = std::chrono::steady_clock::now();
    const auto wall = [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
    for (const auto& wf : workflows) scheduler.register_workflow(wf, wall());
    while (!g_stop) {
      (void)scheduler.tick(wall());
      if (a.duration_s > 0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count() >= a.duration_s) {
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds{250});
    }
    scheduler.wait_idle();
  }
  store.flush();
  registry.save();

  Table t{"runs", {"run_id", "workflow", "kind", "scheduled_for", "status", "failed_worklet"}, {}};
  std::size_t failed = 0;
  for (const auto& r : scheduler.completed()) {
    const auto doc = workflow::to_json(r);
    if (r.status == workflow::RunStatus::failed) ++failed;
    t.add({r.run_id, r.workflow, doc.value("kind", json(nullptr)), format_timestamp(r.scheduled_for),
           doc.value("status", json(nullptr)), r.failed_worklet.empty() ? json(nullptr) : json(r.failed_worklet)});
  }
  emit({t}, g.format);
  return failed == 0 ? 0 : 3;
}

struct ServeArgs {
  std::string listen = "127.0.0.1:8080";
};

int cmd_serve(const Globals& g, const ServeArgs& a) {
  const DataDir d{g.data_dir};
  const auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "--listen expects host:port");
  int port = 0;
  try {
    port = std::stoi(a.listen.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port <= 0 || port > 65535) throw Error(ErrorCode::invalid_argument, "bad port in '" + a.listen + "'");
  core::ReadingStore store(d.store());
  analytics::ModelRegistry registry(d.models());
  analytics::AnomalyLog anomalies(d.anomalies());
  api::ThresholdStore thresholds(d.thresholds());
  api::FileOutbox outbox(d.outbox());
  api::FeedbackEngine feedback(store, registry, outbox);
  const api::ApiService service(api::ApiServices{
      store, registry, anomalies, thresholds, feedback, outbox,
      [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }, {}});
  std::cerr << "listening on " << a.listen << '\n';
  service.serve(a.listen.substr(0, colon), port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smart-meter analytics engine"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--data-dir", g.data_dir, "Data directory")->envname("SMAS_DATA_DIR");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "tsv"}));

  std::function<int()> run;

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Load a meter CSV (and optional weather CSV) into the store");
  ingest->add_option("--meters", ingest_args.meters, "meter_id,timestamp,kwh[,temp_c] file")->required();
  ingest->add_option("--weather", ingest_args.weather, "timestamp,temp_c file");
  ingest->add_option("--customers", ingest_args.customers, "JSON array of customer records");
  ingest->add_flag("--skip-malformed", ingest_args.skip_malformed, "Skip bad rows instead of failing");
  ingest->add_flag("--upsert", ingest_args.upsert, "Replace existing hours instead of failing");
  ingest->callback([&] { run = [&] { return cmd_ingest(g, ingest_args); }; });

  GenerateArgs gen_args;
  auto* gen = app.add_subcommand("generate", "Generate synthetic meters into the store");
  gen->add_option("--series", gen_args.series)->check(CLI::PositiveNumber);
  gen->add_option("--days", gen_args.days)->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_args.seed);
  gen->add_option("--noise", gen_args.noise);
  gen->add_option("--weekend-scale", gen_args.weekend_scale, "Activity multiplier on weekend days");
  gen->add_option("--anomalies", gen_args.anomalies, "Random anomalous days per series");
  gen->add_option("--anomaly-min-day", gen_args.anomaly_min_day);
  gen->add_option("--response", gen_args.response)->check(CLI::IsMember({"parx", "three_line"}));
  gen->add_option("--start", gen_args.start);
  gen->add_option("--prefix", gen_args.prefix);
  gen->add_option("--neighborhood-size", gen_args.neighborhood_size, "Assign meters to neighborhoods of this size");
  gen->add_option("--csv", gen_args.csv, "Write meters.csv and weather.csv here instead of the store");
  gen->callback([&] { run = [&] { return cmd_generate(g, gen_args); }; });

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Build every per-meter model");
  fit->add_option("--order-p", fit_args.order_p)->check(CLI::Range(1, 14));
  fit->add_option("--training-days", fit_args.training_days)->check(CLI::PositiveNumber);
  fit->add_option("--meters", fit_args.meters)->delimiter(',');
  fit->callback([&] { run = [&] { return cmd_fit(g, fit_args); }; });

  MeterArgs dis_args;
  auto* dis = app.add_subcommand("disaggregate", "Split a meter's load into temperature parts");
  dis->add_option("--meter", dis_args.meter)->required();
  dis->callback([&] { run = [&] { return cmd_disaggregate(g, dis_args); }; });

  MeterArgs profile_args;
  auto* profile = app.add_subcommand("profile", "Daily profile, three-line model and histogram of a meter");
  profile->add_option("--meter", profile_args.meter)->required();
  profile->callback([&] { run = [&] { return cmd_profile(g, profile_args); }; });

  SegmentArgs seg_args;
  auto* seg = app.add_subcommand("segment", "Cluster fitted meters");
  seg->add_option("--k", seg_args.k)->check(CLI::PositiveNumber);
  seg->add_option("--features", seg_args.features)->delimiter(',');
  seg->add_option("--seed", seg_args.seed);
  seg->callback([&] { run = [&] { return cmd_segment(g, seg_args); }; });

  ForecastArgs fc_args;
  auto* fc = app.add_subcommand("forecast", "Forecast a meter");
  fc->add_option("--meter", fc_args.meter)->required();
  fc->add_option("--method", fc_args.method)->check(CLI::IsMember({"parx", "holt_winters", "averaging"}));
  fc->add_option("--horizon", fc_args.horizon)->check(CLI::PositiveNumber);
  fc->add_option("--granularity", fc_args.granularity);
  fc->callback([&] { run = [&] { return cmd_forecast(g, fc_args); }; });

  DetectArgs det_args;
  auto* det = app.add_subcommand("detect", "Train detectors and print daily anomaly counts");
  det->add_option("--train-days", det_args.train_days)->check(CLI::PositiveNumber);
  det->add_option("--epsilon", det_args.epsilons, "One or more thresholds")->delimiter(',');
  det->add_option("--from", det_args.from, "First replayed day (default: after training)");
  det->add_option("--to", det_args.to, "Day after the last replayed day");
  det->add_option("--meters", det_args.meters)->delimiter(',');
  det->add_flag("--weekday-split", det_args.weekday_split);
  det->add_flag("--record", det_args.record, "Append the first threshold's reports to the anomaly log");
  det->callback([&] { run = [&] { return cmd_detect(g, det_args); }; });

  EvaluateArgs ev_args;
  auto* ev = app.add_subcommand("evaluate", "Walk-forward RMSE comparison of the forecasting methods");
  ev->add_option("--train-fraction", ev_args.train_fraction)->check(CLI::Range(0.01, 0.99));
  ev->add_option("--refit-every", ev_args.refit_every)->check(CLI::PositiveNumber);
  ev->add_option("--order-p", ev_args.order_p)->check(CLI::Range(1, 14));
  ev->add_option("--meters", ev_args.meters)->delimiter(',');
  ev->callback([&] { run = [&] { return cmd_evaluate(g, ev_args); }; });

  RunArgs run_args;
  auto* rw = app.add_subcommand("run-workflows", "Run scheduled workflows");
  rw->add_option("--config", run_args.config, "Workflow definitions (JSON)");
  rw->add_option("--simulated-clock", run_args.simulated_clock, "start..end [step]")->expected(1, 2);
  rw->add_option("--duration", run_args.duration_s, "Real-clock mode: stop after this many seconds");
  rw->add_option("--threads", run_args.threads, "Run workflows on a thread pool of this size");
  rw->callback([&] { run = [&] { return cmd_run_workflows(g, run_args); }; });

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  serve->add_option("--listen", serve_args.listen, "host:port");
  serve->callback([&] { run = [&] { return cmd_serve(g, serve_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
