#include "smas/workflow/config.hpp"

#include <fstream>
#include <sstream>

#include "smas/analytics/model_io.hpp"
#include "smas/error.hpp"
#include "smas/ingest/anonymize.hpp"
#include "smas/ingest/csv.hpp"
#include "smas/json_io.hpp"
#include "smas/workflow/pipeline.hpp"

namespace smas::workflow {

namespace {

std::filesystem::path resolve(const WorkletEnvironment& env, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : env.data_dir / path;
}

template <typename T>
T& need(T* service, const char* what) {
  if (!service) throw Error(ErrorCode::dependency, std::string("worklet needs a ") + what);
  return *service;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest::sha256_hex(buf.str());
}

std::string reports_digest(const std::vector<analytics::AnomalyReport>& reports) {
  std::string text;
  for (const auto& r : reports) text += json_io::dump(analytics::to_json(r)) + "\n";
  return ingest::sha256_hex(text);
}

Worklet make_worklet(std::string name, WorkletKind kind, const json& params,
                     std::function<WorkletOutput(const WorkletContext&)> run) {
  return Worklet{std::move(name), kind, params, std::move(run)};
}

}  // namespace

void WorkletCatalog::add(const std::string& type, Factory factory) { factories_[type] = std::move(factory); }

Worklet WorkletCatalog::make(const std::string& type, const std::string& name, const json& params) const {
  const auto it = factories_.find(type);
  if (it == factories_.end()) {
    std::string known;
    for (const auto& [t, f] : factories_) known += (known.empty() ? "" : ", ") + t;
    throw Error(ErrorCode::invalid_argument, "unknown worklet type '" + type + "' (known: " + known + ")");
  }
  return it->second(name, params);
}

std::vector<std::string> WorkletCatalog::types() const {
  std::vector<std::string> out;
  for (const auto& [t, f] : factories_) out.push_back(t);
  return out;
}

WorkletCatalog builtin_worklets(const WorkletEnvironment& env) {
  WorkletCatalog c;
  c.add("ingest_csv", [env](const std::string& name, const json& params) {
    const auto path = resolve(env, params.at("path").get<std::string>());
    const auto weather = params.contains("weather") ? std::optional(resolve(env, params["weather"].get<std::string>()))
                                                    : std::nullopt;
    return make_worklet(name, WorkletKind::ingest, params, [env, path, weather](const WorkletContext&) {
      auto& store = need(env.store, "reading store");
      auto rows = ingest::parse_meter_csv(path).readings;
      if (weather) rows = ingest::join_weather(rows, ingest::parse_weather_csv(*weather).points);
      store.insert_readings(rows, core::DuplicatePolicy::upsert);
      std::ostringstream canon;
      ingest::write_meter_csv(canon, rows, true);
      return WorkletOutput{"store", ingest::sha256_hex(canon.str())};
    });
  });
  c.add("anonymize_csv", [env](const std::string& name, const json& params) {
    const auto input = resolve(env, params.at("input").get<std::string>());
    const auto output = resolve(env, params.at("output").get<std::string>());
    const auto salt = params.at("salt").get<std::string>();
    return make_worklet(name, WorkletKind::anonymize, params, [input, output, salt](const WorkletContext&) {
      const auto rows = ingest::anonymize(ingest::parse_meter_csv(input).readings, salt);
      if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
      {
        std::ofstream out(output, std::ios::trunc);
        ingest::write_meter_csv(out, rows, true);
        if (!out) throw Error(ErrorCode::io, "cannot write " + output.string());
      }
      return WorkletOutput{output.string(), file_digest(output)};
    });
  });
  c.add("fit_models", [env](const std::string& name, const json& params) {
    FitOptions opts;
    opts.order_p = params.value("order_p", opts.order_p);
    opts.anomaly.training_days = params.value("training_days", opts.anomaly.training_days);
    return make_worklet(name, WorkletKind::analytics, params, [env, opts](const WorkletContext&) {
      auto& registry = need(env.registry, "model registry");
      const auto summary = fit_all_models(need(env.store, "reading store"), registry, opts);
      std::string text;
      for (const auto& id : registry.meter_ids()) {
        const auto m = registry.models(id);
        if (m.parx) text += json_io::dump(analytics::to_json(*m.parx));
        if (m.three_line) text += json_io::dump(analytics::to_json(*m.three_line));
      }
      return WorkletOutput{"registry:" + std::to_string(summary.meters), ingest::sha256_hex(text)};
    });
  });
  c.add("detect_anomalies", [env](const std::string& name, const json& params) {
    const auto fixed = params.contains("day") ? std::optional(parse_date(params["day"].get<std::string>()))
                                              : std::nullopt;
    const auto window = params.value("window_days", std::size_t{3});
    return make_worklet(name, WorkletKind::analytics, params, [env, fixed, window](const WorkletContext& ctx) {
      const Date day = fixed ? *fixed : date_of(ctx.scheduled_for) - std::chrono::days{1};
      const auto reports = detect_for_day(need(env.store, "reading store"), need(env.registry, "model registry"),
                                          env.thresholds, day, window);
      need(env.anomalies, "anomaly log").append(reports);
      return WorkletOutput{"anomalies:" + format_date(day), reports_digest(reports)};
    });
  });
  c.add("flush", [env](const std::string& name, const json& params) {
    return make_worklet(name, WorkletKind::housekeeping, params, [env](const WorkletContext& ctx) {
      need(env.store, "reading store").flush();
      if (env.registry) env.registry->save();
      return WorkletOutput{ctx.input, ""};
    });
  });
  c.add("notify", [env](const std::string& name, const json& params) {
    return make_worklet(name, WorkletKind::notify, params, [env](const WorkletContext& ctx) {
      const auto sent = need(env.feedback, "feedback engine").evaluate(ctx.scheduled_for);
      std::string text;
      for (const auto& m : sent) text += json_io::dump(api::to_json(m)) + "\n";
      return WorkletOutput{"outbox:" + std::to_string(sent.size()), ingest::sha256_hex(text)};
    });
  });
  return c;
}

std::vector<Workflow> load_workflows(const json& config, const WorkletCatalog& catalog) {
  std::vector<Workflow> out;
  try {
    for (const auto& w : config.at("workflows")) {
      Workflow wf;
      wf.name = w.at("name").get<std::string>();
      const auto& s = w.at("schedule");
      wf.schedule.kind = parse_schedule_kind(s.value("kind", std::string("deterministic")));
      wf.schedule.interval = parse_interval(s.at("interval").get<std::string>());
      wf.schedule.anchor = parse_timestamp(s.at("anchor").get<std::string>());
      wf.schedule.cluster_class = s.value("cluster_class", std::string("default"));
      wf.enabled = w.value("enabled", true);
      wf.retries = w.value("retries", 0u);
      wf.input = w.value("input", std::string{});
      for (const auto& k : w.at("worklets")) {
        const auto params = k.value("params", json::object());
        auto worklet = catalog.make(k.at("type").get<std::string>(), k.value("name", k.at("type").get<std::string>()),
                                    params);
        if (k.contains("kind")) worklet.kind = parse_worklet_kind(k["kind"].get<std::string>());
        wf.worklets.push_back(std::move(worklet));
      }
      if (wf.worklets.empty()) throw Error(ErrorCode::invalid_argument, "workflow '" + wf.name + "' has no worklets");
      out.push_back(std::move(wf));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("invalid workflow config: ") + e.what());
  }
  return out;
}

std::vector<Workflow> load_workflows(const std::filesystem::path& path, const WorkletCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  const auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::parse, "workflow config " + path.string() + " is not valid JSON");
  return load_workflows(doc, catalog);
}

}  // namespace smas::workflow
