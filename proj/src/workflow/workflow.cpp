#include "smas/workflow/workflow.hpp"

#include <array>
#include <fstream>

#include "smas/error.hpp"
#include "smas/json_io.hpp"

namespace smas::workflow {

namespace {

constexpr std::array<std::pair<WorkletKind, std::string_view>, 6> kKinds{{
    {WorkletKind::ingest, "ingest"},
    {WorkletKind::transform, "transform"},
    {WorkletKind::anonymize, "anonymize"},
    {WorkletKind::analytics, "analytics"},
    {WorkletKind::housekeeping, "housekeeping"},
    {WorkletKind::notify, "notify"},
}};

RunStatus parse_status(std::string_view text) {
  if (text == "ok") return RunStatus::ok;
  if (text == "failed") return RunStatus::failed;
  if (text == "skipped") return RunStatus::skipped;
  throw Error(ErrorCode::parse, "unknown run status '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(WorkletKind kind) noexcept {
  for (const auto& [k, name] : kKinds) {
    if (k == kind) return name;
  }
  return "unknown";
}

WorkletKind parse_worklet_kind(std::string_view text) {
  for (const auto& [k, name] : kKinds) {
    if (name == text) return k;
  }
  throw Error(ErrorCode::invalid_argument,
              "unknown worklet kind '" + std::string(text) +
                  "' (expected ingest, transform, anonymize, analytics, housekeeping or notify)");
}

std::string_view to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::ok: return "ok";
    case RunStatus::failed: return "failed";
    case RunStatus::skipped: return "skipped";
  }
  return "unknown";
}

std::vector<RunStatus> RunRecord::statuses() const {
  std::vector<RunStatus> out;
  out.reserve(worklets.size());
  for (const auto& w : worklets) out.push_back(w.status);
  return out;
}

RunRecord run_workflow(const Workflow& workflow, const RunContext& context) {
  RunRecord record;
  record.run_id = context.run_id;
  record.workflow = workflow.name;
  record.kind = context.kind;
  record.scheduled_for = context.scheduled_for;
  record.started_at = context.started_at;
  record.enqueued_at = context.enqueued_at;
  std::string input = workflow.input;
  bool failed = false;
  for (const auto& worklet : workflow.worklets) {
    WorkletRecord wr;
    wr.name = worklet.name;
    if (failed) {
      record.worklets.push_back(std::move(wr));
      continue;
    }
    const WorkletContext ctx{context.run_id, workflow.name, context.scheduled_for, input, &worklet.params};
    const auto t0 = std::chrono::steady_clock::now();
    for (unsigned attempt = 0; attempt <= workflow.retries; ++attempt) {
      ++wr.attempts;
      try {
        if (!worklet.run) throw Error(ErrorCode::invalid_argument, "worklet has no body");
        auto out = worklet.run(ctx);
        wr.status = RunStatus::ok;
        wr.output = std::move(out.handle);
        wr.digest = std::move(out.digest);
        wr.error.clear();
        break;
      } catch (const std::exception& e) {
        wr.status = RunStatus::failed;
        wr.error = e.what();
      }
    }
    wr.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (wr.status == RunStatus::failed) {
      failed = true;
      record.status = RunStatus::failed;
      record.failed_worklet = worklet.name;
    } else {
      input = wr.output;
    }
    record.worklets.push_back(std::move(wr));
  }
  return record;
}

json to_json(const RunRecord& record) {
  json doc = json::object();
  doc["run_id"] = record.run_id;
  doc["workflow"] = record.workflow;
  doc["kind"] = std::string(to_string(record.kind));
  doc["scheduled_for"] = format_timestamp(record.scheduled_for);
  doc["started_at"] = format_timestamp(record.started_at);
  doc["enqueued_at"] = record.enqueued_at ? json(format_timestamp(*record.enqueued_at)) : json(nullptr);
  doc["status"] = std::string(to_string(record.status));
  doc["failed_worklet"] = record.failed_worklet;
  json ws = json::array();
  for (const auto& w : record.worklets) {
    ws.push_back(json{{"name", w.name},
                      {"status", std::string(to_string(w.status))},
                      {"attempts", w.attempts},
                      {"output", w.output},
                      {"digest", w.digest},
                      {"error", w.error},
                      {"duration_ms", json_io::put_double(w.duration_ms)}});
  }
  doc["worklets"] = std::move(ws);
  return doc;
}

RunRecord run_record_from_json(const json& doc) {
  try {
    RunRecord r;
    r.run_id = doc.at("run_id").get<std::string>();
    r.workflow = doc.at("workflow").get<std::string>();
    r.kind = parse_schedule_kind(doc.at("kind").get<std::string>());
    r.scheduled_for = parse_timestamp(doc.at("scheduled_for").get<std::string>());
    r.started_at = parse_timestamp(doc.at("started_at").get<std::string>());
    if (!doc.at("enqueued_at").is_null()) r.enqueued_at = parse_timestamp(doc.at("enqueued_at").get<std::string>());
    r.status = parse_status(doc.at("status").get<std::string>());
    r.failed_worklet = doc.at("failed_worklet").get<std::string>();
    for (const auto& w : doc.at("worklets")) {
      WorkletRecord wr;
      wr.name = w.at("name").get<std::string>();
      wr.status = parse_status(w.at("status").get<std::string>());
      wr.attempts = w.at("attempts").get<unsigned>();
      wr.output = w.at("output").get<std::string>();
      wr.digest = w.at("digest").get<std::string>();
      wr.error = w.at("error").get<std::string>();
      wr.duration_ms = json_io::get_double(w.at("duration_ms"));
      r.worklets.push_back(std::move(wr));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("bad run record: ") + e.what());
  }
}

RunLog::RunLog(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::parse, "malformed line in " + path_->string());
    records_.push_back(run_record_from_json(doc));
  }
}

void RunLog::append(const RunRecord& record) {
  std::lock_guard lock(mutex_);
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app);
    out << json_io::dump(to_json(record)) << '\n';
    if (!out) throw Error(ErrorCode::io, "cannot append to " + path_->string());
  }
  records_.push_back(record);
}

std::vector<RunRecord> RunLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

}  // namespace smas::workflow
