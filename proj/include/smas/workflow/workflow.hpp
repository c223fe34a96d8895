#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "smas/time.hpp"
#include "smas/workflow/schedule.hpp"

namespace smas::workflow {

using nlohmann::json;

enum class WorkletKind { ingest, transform, anonymize, analytics, housekeeping, notify };

[[nodiscard]] std::string_view to_string(WorkletKind kind) noexcept;
[[nodiscard]] WorkletKind parse_worklet_kind(std::string_view text);

/// What a worklet sees when it runs.
struct WorkletContext {
  std::string run_id;
  std::string workflow;
  Timestamp scheduled_for{};
  /// Output handle of the previous worklet, or the workflow input for the first.
  std::string input;
  const json* params = nullptr;
};

struct WorkletOutput {
  /// Dataset handle passed on to the next worklet.
  std::string handle;
  /// Content digest of what the worklet produced; equal digests mean equal output.
  std::string digest;
};

/// One processing unit of a workflow. `run` throws to signal failure and must
/// be restartable: running it again on the same input yields the same output.
struct Worklet {
  std::string name;
  WorkletKind kind = WorkletKind::transform;
  json params = json::object();
  std::function<WorkletOutput(const WorkletContext&)> run;
};

struct Workflow {
  std::string name;
  std::vector<Worklet> worklets;
  Schedule schedule;
  bool enabled = true;
  /// Extra attempts granted to a failing worklet before the run fails.
  unsigned retries = 0;
  /// Input handle given to the first worklet.
  std::string input;
};

enum class RunStatus { ok, failed, skipped };

[[nodiscard]] std::string_view to_string(RunStatus status) noexcept;

struct WorkletRecord {
  std::string name;
  RunStatus status = RunStatus::skipped;
  unsigned attempts = 0;
  std::string output;
  std::string digest;
  std::string error;
  double duration_ms = 0.0;
};

struct RunRecord {
  std::string run_id;
  std::string workflow;
  ScheduleKind kind = ScheduleKind::deterministic;
  Timestamp scheduled_for{};
  /// Clock time at which the run was handed to the executor.
  Timestamp started_at{};
  /// Queued runs only: when the job entered the queue.
  std::optional<Timestamp> enqueued_at;
  RunStatus status = RunStatus::ok;
  std::string failed_worklet;
  std::vector<WorkletRecord> worklets;

  [[nodiscard]] std::vector<RunStatus> statuses() const;
};

/// Identifies a run and when it was due.
struct RunContext {
  std::string run_id;
  ScheduleKind kind = ScheduleKind::deterministic;
  Timestamp scheduled_for{};
  Timestamp started_at{};
  std::optional<Timestamp> enqueued_at;
};

/**
 * @brief Executes the worklets in order. A worklet that still fails after
 * `retries` extra attempts marks the run failed and the remaining worklets
 * skipped. Never throws for worklet failures.
 */
[[nodiscard]] RunRecord run_workflow(const Workflow& workflow, const RunContext& context);

[[nodiscard]] json to_json(const RunRecord& record);
[[nodiscard]] RunRecord run_record_from_json(const json& doc);

/// Append-only JSON-lines log of run records. Safe for concurrent use.
class RunLog {
 public:
  RunLog() = default;
  explicit RunLog(std::filesystem::path path);

  void append(const RunRecord& record);
  [[nodiscard]] std::vector<RunRecord> records() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<RunRecord> records_;
};

}  // namespace smas::workflow
