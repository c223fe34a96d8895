#include "smas/workflow/scheduler.hpp"

#include <algorithm>

#include <boost/asio/post.hpp>
#include <boost/asio/thread_pool.hpp>

#include "smas/error.hpp"

namespace smas::workflow {

void ManualExecutor::submit(std::function<void()> task) {
  std::lock_guard lock(mutex_);
  tasks_.push_back(std::move(task));
}

bool ManualExecutor::run_next() {
  std::function<void()> task;
  {
    std::lock_guard lock(mutex_);
    if (tasks_.empty()) return false;
    task = std::move(tasks_.front());
    tasks_.pop_front();
  }
  task();
  return true;
}

void ManualExecutor::run_all() {
  while (run_next()) {
  }
}

std::size_t ManualExecutor::pending() const {
  std::lock_guard lock(mutex_);
  return tasks_.size();
}

ThreadPoolExecutor::ThreadPoolExecutor(std::size_t threads)
    : pool_(std::make_unique<boost::asio::thread_pool>(std::max<std::size_t>(1, threads))) {}

ThreadPoolExecutor::~ThreadPoolExecutor() {
  wait_idle();
  pool_->join();
}

void ThreadPoolExecutor::submit(std::function<void()> task) {
  {
    std::lock_guard lock(mutex_);
    ++outstanding_;
  }
  boost::asio::post(*pool_, [this, task = std::move(task)] {
    try {
      task();
    } catch (...) {
    }
    std::lock_guard lock(mutex_);
    if (--outstanding_ == 0) idle_.notify_all();
  });
}

void ThreadPoolExecutor::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return outstanding_ == 0; });
}

Scheduler::Scheduler(Executor& executor, RunLog* log) : executor_(executor), log_(log) {}

Scheduler::~Scheduler() { executor_.wait_idle(); }

std::string Scheduler::register_workflow(Workflow workflow, Timestamp now) {
  if (workflow.name.empty()) throw Error(ErrorCode::invalid_argument, "workflow name must not be empty");
  if (workflow.worklets.empty()) {
    throw Error(ErrorCode::invalid_argument, "workflow '" + workflow.name + "' has no worklets");
  }
  std::lock_guard lock(mutex_);
  if (entries_.count(workflow.name) != 0) {
    throw Error(ErrorCode::duplicate, "workflow '" + workflow.name + "' is already registered");
  }
  Entry entry;
  entry.next_run = next_occurrence_at_or_after(workflow.schedule, now);
  entry.enabled = workflow.enabled;
  const auto name = workflow.name;
  if (workflow.schedule.kind == ScheduleKind::queued) classes_[workflow.schedule.cluster_class];
  entry.workflow = std::make_shared<const Workflow>(std::move(workflow));
  entries_.emplace(name, std::move(entry));
  order_.push_back(name);
  return name;
}

std::string Scheduler::next_run_id(const std::string& workflow) {
  return workflow + "#" + std::to_string(++run_counter_);
}

std::vector<StartedRun> Scheduler::tick(Timestamp now) {
  std::vector<std::pair<std::shared_ptr<const Workflow>, RunContext>> launches;
  std::vector<StartedRun> started;
  {
    std::lock_guard lock(mutex_);
    if (last_tick_ && now < *last_tick_) {
      throw Error(ErrorCode::invalid_argument, "tick time moved backwards");
    }
    last_tick_ = now;
    for (const auto& name : order_) {
      auto& e = entries_.at(name);
      if (!e.enabled || !e.next_run || *e.next_run > now) continue;
      const auto due = *e.next_run;
      e.next_run = next_occurrence_after(e.workflow->schedule, now);
      const auto& schedule = e.workflow->schedule;
      if (schedule.kind == ScheduleKind::deterministic) {
        RunContext ctx{next_run_id(name), ScheduleKind::deterministic, due, now, std::nullopt};
        started.push_back({ctx.run_id, name, ctx.kind, due});
        launches.emplace_back(e.workflow, std::move(ctx));
      } else {
        classes_[schedule.cluster_class].pending.push_back({next_run_id(name), name, due, now});
      }
    }
    for (auto& [cls, state] : classes_) {
      if (state.running > 0 || state.pending.empty()) continue;
      auto job = std::move(state.pending.front());
      state.pending.pop_front();
      ++state.running;
      max_queued_running_.store(std::max(max_queued_running_.load(), state.running));
      queue_waits_.push_back(static_cast<double>((now - job.enqueued_at).count()));
      RunContext ctx{job.run_id, ScheduleKind::queued, job.scheduled_for, now, job.enqueued_at};
      started.push_back({ctx.run_id, job.workflow, ctx.kind, job.scheduled_for});
      launches.emplace_back(entries_.at(job.workflow).workflow, std::move(ctx));
    }
    if (observer_) {
      for (const auto& [wf, ctx] : launches) {
        const auto& cls = wf->schedule.cluster_class;
        observer_(RunEvent{RunEventType::started, ctx.run_id, wf->name, ctx.kind,
                           classes_.count(cls) != 0 ? classes_.at(cls).running : 0});
      }
    }
  }
  for (auto& [wf, ctx] : launches) launch(wf, std::move(ctx));
  return started;
}

std::string Scheduler::enqueue(const std::string& workflow, Timestamp now) {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(workflow);
  if (it == entries_.end()) throw Error(ErrorCode::not_found, "unknown workflow '" + workflow + "'");
  const auto& schedule = it->second.workflow->schedule;
  if (schedule.kind != ScheduleKind::queued) {
    throw Error(ErrorCode::invalid_argument, "workflow '" + workflow + "' is not queued-class");
  }
  auto id = next_run_id(workflow);
  classes_[schedule.cluster_class].pending.push_back({id, workflow, now, now});
  return id;
}

void Scheduler::launch(const std::shared_ptr<const Workflow>& workflow, RunContext context) {
  executor_.submit([this, workflow, context = std::move(context)] { finish(run_workflow(*workflow, context)); });
}

void Scheduler::finish(RunRecord record) {
  if (log_) log_->append(record);
  std::lock_guard lock(mutex_);
  std::size_t running = 0;
  if (record.kind == ScheduleKind::queued) {
    auto& state = classes_.at(entries_.at(record.workflow).workflow->schedule.cluster_class);
    --state.running;
    running = state.running;
  }
  if (observer_) observer_(RunEvent{RunEventType::finished, record.run_id, record.workflow, record.kind, running});
  completed_.push_back(std::move(record));
}

void Scheduler::set_enabled(const std::string& workflow, bool enabled) {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(workflow);
  if (it == entries_.end()) throw Error(ErrorCode::not_found, "unknown workflow '" + workflow + "'");
  it->second.enabled = enabled;
}

std::optional<Timestamp> Scheduler::next_run(const std::string& workflow) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(workflow);
  if (it == entries_.end()) throw Error(ErrorCode::not_found, "unknown workflow '" + workflow + "'");
  return it->second.next_run;
}

std::vector<std::string> Scheduler::workflow_names() const {
  std::lock_guard lock(mutex_);
  return order_;
}

std::vector<QueuedJob> Scheduler::queue(const std::string& cluster_class) const {
  std::lock_guard lock(mutex_);
  const auto it = classes_.find(cluster_class);
  if (it == classes_.end()) return {};
  return {it->second.pending.begin(), it->second.pending.end()};
}

std::size_t Scheduler::queued_running(const std::string& cluster_class) const {
  std::lock_guard lock(mutex_);
  const auto it = classes_.find(cluster_class);
  return it == classes_.end() ? 0 : it->second.running;
}

std::vector<RunRecord> Scheduler::completed() const {
  std::lock_guard lock(mutex_);
  return completed_;
}

std::vector<double> Scheduler::queue_waits() const {
  std::lock_guard lock(mutex_);
  return queue_waits_;
}

void Scheduler::set_observer(std::function<void(const RunEvent&)> observer) {
  std::lock_guard lock(mutex_);
  observer_ = std::move(observer);
}

}  // namespace smas::workflow
