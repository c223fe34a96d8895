#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "smas/workflow/workflow.hpp"

namespace boost::asio {
class thread_pool;
}

namespace smas::workflow {

/// Runs submitted tasks. The scheduler never blocks on a task.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual void submit(std::function<void()> task) = 0;
  /// Blocks until every submitted task has finished.
  virtual void wait_idle() = 0;
};

/// Runs each task inside submit().
class InlineExecutor final : public Executor {
 public:
  void submit(std::function<void()> task) override { task(); }
  void wait_idle() override {}
};

/// Holds tasks until the caller runs them, so tests decide when jobs finish.
class ManualExecutor final : public Executor {
 public:
  void submit(std::function<void()> task) override;
  void wait_idle() override { run_all(); }
  /// Runs the oldest pending task; false when none is pending.
  bool run_next();
  void run_all();
  [[nodiscard]] std::size_t pending() const;

 private:
  mutable std::mutex mutex_;
  std::deque<std::function<void()>> tasks_;
};

/// Fixed-size worker pool.
class ThreadPoolExecutor final : public Executor {
 public:
  explicit ThreadPoolExecutor(std::size_t threads);
  ~ThreadPoolExecutor() override;
  void submit(std::function<void()> task) override;
  void wait_idle() override;

 private:
  std::unique_ptr<boost::asio::thread_pool> pool_;
  std::mutex mutex_;
  std::condition_variable idle_;
  std::size_t outstanding_ = 0;
};

struct StartedRun {
  std::string run_id;
  std::string workflow;
  ScheduleKind kind = ScheduleKind::deterministic;
  Timestamp scheduled_for{};
};

enum class RunEventType { started, finished };

struct RunEvent {
  RunEventType type = RunEventType::started;
  std::string run_id;
  std::string workflow;
  ScheduleKind kind = ScheduleKind::deterministic;
  /// Queued-class runs in progress right after the event.
  std::size_t queued_running = 0;
};

struct QueuedJob {
  std::string run_id;
  std::string workflow;
  Timestamp scheduled_for{};
  Timestamp enqueued_at{};
};

/**
 * @brief Single coordinator for deterministic and queued workflows.
 *
 * Time is whatever the caller passes to tick(), so a simulated clock gives
 * fully reproducible runs. Each tick starts every enabled deterministic
 * workflow that is due (once, however many periods were missed) and enqueues
 * due queued workflows. Each cluster class has one FIFO queue and one
 * execution slot; a tick starts at most one job per class, and only when that
 * class has nothing running.
 */
class Scheduler {
 public:
  explicit Scheduler(Executor& executor, RunLog* log = nullptr);
  ~Scheduler();

  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  /// Registers a workflow and computes its first due time at or after `now`.
  /// Throws Error(duplicate) for a taken name and Error(invalid_argument) for
  /// an empty name or worklet list. Returns the workflow id (its name).
  std::string register_workflow(Workflow workflow, Timestamp now);

  std::vector<StartedRun> tick(Timestamp now);

  /// Adds a queued-class workflow to its queue outside its schedule.
  std::string enqueue(const std::string& workflow, Timestamp now);

  void set_enabled(const std::string& workflow, bool enabled);
  [[nodiscard]] std::optional<Timestamp> next_run(const std::string& workflow) const;
  [[nodiscard]] std::vector<std::string> workflow_names() const;
  [[nodiscard]] std::vector<QueuedJob> queue(const std::string& cluster_class = "default") const;
  [[nodiscard]] std::size_t queued_running(const std::string& cluster_class = "default") const;
  /// Largest number of queued-class runs of one class ever in progress at once.
  [[nodiscard]] std::size_t max_queued_concurrency() const noexcept { return max_queued_running_.load(); }
  /// Finished runs in completion order.
  [[nodiscard]] std::vector<RunRecord> completed() const;
  /// Seconds each started queued job waited, in start order.
  [[nodiscard]] std::vector<double> queue_waits() const;

  /// Receives start and finish events, serialized under the scheduler lock.
  void set_observer(std::function<void(const RunEvent&)> observer);

  /// Waits for every started run to finish.
  void wait_idle() { executor_.wait_idle(); }

 private:
  struct Entry {
    std::shared_ptr<const Workflow> workflow;
    std::optional<Timestamp> next_run;
    bool enabled = true;
  };
  struct ClassState {
    std::deque<QueuedJob> pending;
    std::size_t running = 0;
  };

  std::string next_run_id(const std::string& workflow);
  void launch(const std::shared_ptr<const Workflow>& workflow, RunContext context);
  void finish(RunRecord record);

  Executor& executor_;
  RunLog* log_;
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::map<std::string, ClassState> classes_;
  std::vector<RunRecord> completed_;
  std::vector<double> queue_waits_;
  std::function<void(const RunEvent&)> observer_;
  std::size_t run_counter_ = 0;
  std::atomic<std::size_t> max_queued_running_{0};
  std::optional<Timestamp> last_tick_;
};

}  // namespace smas::workflow
