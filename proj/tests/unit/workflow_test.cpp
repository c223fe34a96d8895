#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>
#include <unistd.h>

#include "smas/error.hpp"
#include "smas/ingest/csv.hpp"
#include "smas/workflow/config.hpp"
#include "smas/workflow/scheduler.hpp"

using namespace smas;
using namespace smas::workflow;
namespace fs = std::filesystem;

namespace {

Timestamp at(const char* text) { return parse_timestamp(text); }

Worklet noop(const std::string& name, std::vector<std::string>* trace = nullptr) {
  return Worklet{name, WorkletKind::transform, json::object(), [name, trace](const WorkletContext& ctx) {
                   if (trace) trace->push_back(name);
                   return WorkletOutput{ctx.input + "/" + name, name};
                 }};
}

Workflow daily(const std::string& name, const char* anchor) {
  Workflow w;
  w.name = name;
  w.worklets = {noop("a")};
  w.schedule = Schedule::deterministic(Interval::daily, at(anchor));
  return w;
}

Workflow queued(const std::string& name, const char* anchor, Interval interval = Interval::once) {
  Workflow w;
  w.name = name;
  w.worklets = {noop("q")};
  w.schedule = Schedule::queued(interval, at(anchor));
  return w;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("smas_wf_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Schedule, NextRunAfterRegistration) {
  const auto s = Schedule::deterministic(Interval::daily, at("2014-01-01T02:00:00Z"));
  EXPECT_EQ(*next_occurrence_at_or_after(s, at("2014-03-05T05:00:00Z")), at("2014-03-06T02:00:00Z"));
  EXPECT_EQ(*next_occurrence_at_or_after(s, at("2014-03-05T02:00:00Z")), at("2014-03-05T02:00:00Z"));
  EXPECT_EQ(*next_occurrence_at_or_after(s, at("2013-06-01T00:00:00Z")), at("2014-01-01T02:00:00Z"));
  EXPECT_EQ(*next_occurrence_after(s, at("2014-03-05T02:00:00Z")), at("2014-03-06T02:00:00Z"));
}

TEST(Schedule, MonthlyClampsWithoutDrift) {
  const auto s = Schedule::deterministic(Interval::monthly, at("2014-01-31T06:00:00Z"));
  EXPECT_EQ(occurrence(s, 1), at("2014-02-28T06:00:00Z"));
  EXPECT_EQ(occurrence(s, 2), at("2014-03-31T06:00:00Z"));
  EXPECT_EQ(occurrence(s, 13), at("2015-02-28T06:00:00Z"));
  EXPECT_EQ(*next_occurrence_after(s, at("2014-02-28T06:00:00Z")), at("2014-03-31T06:00:00Z"));
}

TEST(Schedule, OnceRunsOnce) {
  const auto s = Schedule::deterministic(Interval::once, at("2014-01-01T00:00:00Z"));
  EXPECT_EQ(*next_occurrence_at_or_after(s, at("2013-01-01T00:00:00Z")), at("2014-01-01T00:00:00Z"));
  EXPECT_FALSE(next_occurrence_after(s, at("2014-01-01T00:00:00Z")).has_value());
  EXPECT_THROW((void)parse_interval("fortnightly"), Error);
}

TEST(Schedule, StartTimesFormArithmeticProgression) {
  // Brute force: tick every minute and compare with anchor + k * step.
  for (const auto interval : {Interval::minutely, Interval::hourly, Interval::daily, Interval::weekly}) {
    InlineExecutor exec;
    Scheduler sched(exec);
    const auto anchor = at("2014-01-01T02:30:00Z");
    Workflow w = daily("w", "2014-01-01T02:30:00Z");
    w.schedule.interval = interval;
    sched.register_workflow(w, at("2014-01-01T00:00:00Z"));
    const auto step = occurrence(w.schedule, 1) - anchor;
    const auto horizon = interval == Interval::minutely ? std::chrono::seconds{std::chrono::hours{30}} : 90 * kDay;
    const auto tick_step = interval == Interval::minutely ? std::chrono::seconds{60} : std::chrono::seconds{600};
    std::vector<Timestamp> starts;
    for (auto t = at("2014-01-01T00:00:00Z"); t < at("2014-01-01T00:00:00Z") + horizon; t += tick_step) {
      for (const auto& r : sched.tick(t)) starts.push_back(r.scheduled_for);
    }
    ASSERT_FALSE(starts.empty());
    for (std::size_t k = 0; k < starts.size(); ++k) ASSERT_EQ(starts[k], anchor + static_cast<long>(k) * step);
    EXPECT_EQ(sched.completed().size(), starts.size());
  }
}

TEST(Scheduler, ExactlyOncePerPeriod) {
  InlineExecutor exec;
  Scheduler sched(exec);
  EXPECT_EQ(sched.register_workflow(daily("nightly", "2014-01-01T02:00:00Z"), at("2014-01-01T00:00:00Z")), "nightly");
  EXPECT_EQ(sched.tick(at("2014-01-01T01:59:59Z")).size(), 0u);
  EXPECT_EQ(sched.tick(at("2014-01-01T02:00:00Z")).size(), 1u);
  EXPECT_EQ(sched.tick(at("2014-01-01T02:00:00Z")).size(), 0u);
  // Missing several periods starts one catch-up run, not one per period.
  EXPECT_EQ(sched.tick(at("2014-01-05T12:00:00Z")).size(), 1u);
  EXPECT_EQ(*sched.next_run("nightly"), at("2014-01-06T02:00:00Z"));
  EXPECT_THROW((void)sched.tick(at("2014-01-01T00:00:00Z")), Error);
}

TEST(Scheduler, RegistrationErrors) {
  InlineExecutor exec;
  Scheduler sched(exec);
  sched.register_workflow(daily("a", "2014-01-01T02:00:00Z"), at("2014-01-01T00:00:00Z"));
  sched.register_workflow(daily("b", "2014-01-01T03:00:00Z"), at("2014-01-01T00:00:00Z"));
  EXPECT_THROW(sched.register_workflow(daily("a", "2014-01-01T02:00:00Z"), at("2014-01-01T00:00:00Z")), Error);
  Workflow empty = daily("c", "2014-01-01T02:00:00Z");
  empty.worklets.clear();
  EXPECT_THROW(sched.register_workflow(empty, at("2014-01-01T00:00:00Z")), Error);
  EXPECT_EQ(sched.tick(at("2014-01-01T02:30:00Z")).size(), 1u);
  EXPECT_EQ(sched.tick(at("2014-01-01T03:30:00Z")).size(), 1u);
}

TEST(Scheduler, DisabledWorkflowDoesNotRun) {
  InlineExecutor exec;
  Scheduler sched(exec);
  auto w = daily("off", "2014-01-01T02:00:00Z");
  w.enabled = false;
  sched.register_workflow(w, at("2014-01-01T00:00:00Z"));
  EXPECT_TRUE(sched.tick(at("2014-01-03T00:00:00Z")).empty());
  sched.set_enabled("off", true);
  EXPECT_EQ(sched.tick(at("2014-01-03T00:00:00Z")).size(), 1u);
}

TEST(Scheduler, QueuedJobsRunFifoOneAtATime) {
  ManualExecutor exec;
  Scheduler sched(exec);
  for (const char* n : {"q1", "q2", "q3"}) sched.register_workflow(queued(n, "2014-01-01T01:00:00Z"), at("2014-01-01T00:00:00Z"));
  auto started = sched.tick(at("2014-01-01T01:00:00Z"));
  ASSERT_EQ(started.size(), 1u);
  EXPECT_EQ(started[0].workflow, "q1");
  const auto waiting = sched.queue();
  ASSERT_EQ(waiting.size(), 2u);
  EXPECT_EQ(waiting[0].workflow, "q2");
  EXPECT_EQ(waiting[1].workflow, "q3");
  EXPECT_EQ(sched.queued_running(), 1u);
  // Nothing new starts while q1 runs.
  EXPECT_TRUE(sched.tick(at("2014-01-01T01:05:00Z")).empty());
  exec.run_all();
  EXPECT_EQ(sched.queued_running(), 0u);
  started = sched.tick(at("2014-01-01T01:10:00Z"));
  ASSERT_EQ(started.size(), 1u);
  EXPECT_EQ(started[0].workflow, "q2");
  exec.run_all();
  started = sched.tick(at("2014-01-01T01:20:00Z"));
  ASSERT_EQ(started.size(), 1u);
  EXPECT_EQ(started[0].workflow, "q3");
  exec.run_all();
  const auto done = sched.completed();
  ASSERT_EQ(done.size(), 3u);
  EXPECT_EQ(done[0].workflow, "q1");
  EXPECT_EQ(done[1].workflow, "q2");
  EXPECT_EQ(done[2].workflow, "q3");
  EXPECT_EQ(sched.queue_waits(), (std::vector<double>{0.0, 600.0, 1200.0}));
  EXPECT_EQ(sched.max_queued_concurrency(), 1u);
}

TEST(Scheduler, RandomInterleavingsKeepFifoAndSingleton) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    ManualExecutor exec;
    Scheduler sched(exec);
    std::vector<std::string> names;
    for (int i = 0; i < 8; ++i) {
      names.push_back("job" + std::to_string(i));
      sched.register_workflow(queued(names.back(), "2014-01-01T00:00:00Z", Interval::hourly),
                              at("2014-01-01T00:00:00Z"));
    }
    std::vector<std::string> enqueued;
    std::size_t running = 0, max_running = 0;
    sched.set_observer([&](const RunEvent& e) {
      if (e.kind != ScheduleKind::queued) return;
      running = e.queued_running;
      max_running = std::max(max_running, running);
    });
    auto t = at("2014-01-01T00:00:00Z");
    for (int step = 0; step < 200; ++step) {
      if (rng() % 3 == 0) {
        const auto& n = names[rng() % names.size()];
        sched.enqueue(n, t);
      }
      for (const auto& q : sched.queue()) (void)q;
      sched.tick(t);
      if (rng() % 2 == 0) exec.run_next();
      t += std::chrono::minutes{7};
    }
    exec.run_all();
    EXPECT_LE(max_running, 1u);
    EXPECT_EQ(sched.max_queued_concurrency(), 1u);
    // Completion order equals enqueue order: run ids carry a global counter.
    std::vector<std::size_t> seq;
    for (const auto& r : sched.completed()) {
      if (r.kind != ScheduleKind::queued) continue;
      seq.push_back(std::stoul(r.run_id.substr(r.run_id.find('#') + 1)));
    }
    EXPECT_TRUE(std::is_sorted(seq.begin(), seq.end()));
  }
}

TEST(Scheduler, ThreadPoolHonoursSingleSlot) {
  ThreadPoolExecutor exec(4);
  Scheduler sched(exec);
  std::atomic<int> in_flight{0}, peak{0};
  for (int i = 0; i < 6; ++i) {
    Workflow w = queued("t" + std::to_string(i), "2014-01-01T00:00:00Z");
    w.worklets = {Worklet{"sleep", WorkletKind::analytics, json::object(), [&](const WorkletContext&) {
                            const int now = ++in_flight;
                            int p = peak.load();
                            while (now > p && !peak.compare_exchange_weak(p, now)) {
                            }
                            std::this_thread::sleep_for(std::chrono::milliseconds(5));
                            --in_flight;
                            return WorkletOutput{};
                          }}};
    sched.register_workflow(w, at("2014-01-01T00:00:00Z"));
  }
  sched.register_workflow(daily("det", "2014-01-01T00:00:00Z"), at("2014-01-01T00:00:00Z"));
  auto t = at("2014-01-01T00:00:00Z");
  for (int i = 0; i < 400 && sched.completed().size() < 7; ++i) {
    sched.tick(t);
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    t += std::chrono::seconds{1};
  }
  sched.wait_idle();
  EXPECT_EQ(sched.completed().size(), 7u);
  EXPECT_EQ(peak.load(), 1);
}

TEST(RunWorkflow, StatusesInOrder) {
  std::vector<std::string> trace;
  Workflow w;
  w.name = "chain";
  w.input = "raw";
  w.worklets = {noop("extract", &trace), noop("cleanse", &trace), noop("housekeep", &trace), noop("notify", &trace)};
  const auto ok = run_workflow(w, RunContext{"chain#1"});
  EXPECT_EQ(ok.statuses(), std::vector<RunStatus>(4, RunStatus::ok));
  EXPECT_EQ(trace, (std::vector<std::string>{"extract", "cleanse", "housekeep", "notify"}));
  EXPECT_EQ(ok.worklets[3].output, "raw/extract/cleanse/housekeep/notify");

  w.worklets[1].run = [](const WorkletContext&) -> WorkletOutput { throw std::runtime_error("bad rows"); };
  const auto failed = run_workflow(w, RunContext{"chain#2"});
  EXPECT_EQ(failed.statuses(),
            (std::vector<RunStatus>{RunStatus::ok, RunStatus::failed, RunStatus::skipped, RunStatus::skipped}));
  EXPECT_EQ(failed.status, RunStatus::failed);
  EXPECT_EQ(failed.failed_worklet, "cleanse");
  EXPECT_EQ(failed.worklets[1].error, "bad rows");
}

TEST(RunWorkflow, RetriesAreCounted) {
  int calls = 0;
  Workflow w;
  w.name = "flaky";
  w.retries = 2;
  w.worklets = {Worklet{"once", WorkletKind::ingest, json::object(), [&](const WorkletContext&) {
                          if (++calls < 2) throw std::runtime_error("transient");
                          return WorkletOutput{"done", ""};
                        }}};
  const auto r = run_workflow(w, RunContext{"flaky#1"});
  EXPECT_EQ(r.status, RunStatus::ok);
  EXPECT_EQ(r.worklets[0].attempts, 2u);
}

TEST(RunLogTest, PersistsRecords) {
  const auto dir = scratch("runlog");
  {
    RunLog log(dir / "runs.jsonl");
    InlineExecutor exec;
    Scheduler sched(exec, &log);
    sched.register_workflow(daily("d", "2014-01-01T00:00:00Z"), at("2014-01-01T00:00:00Z"));
    for (int day = 0; day < 3; ++day) sched.tick(at("2014-01-01T00:00:00Z") + day * kDay);
  }
  RunLog again(dir / "runs.jsonl");
  const auto records = again.records();
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[2].scheduled_for, at("2014-01-03T00:00:00Z"));
  EXPECT_EQ(records[0].worklets[0].output, "/a");
  fs::remove_all(dir);
}

TEST(BuiltinWorklets, RerunningIsIdempotent) {
  const auto dir = scratch("builtin");
  {
    std::ofstream csv(dir / "in.csv");
    csv << "meter_id,timestamp,kwh\nm1,2014-01-01T00:00:00Z,1.5\nm2,2014-01-01T00:00:00Z,x\n";
  }
  core::ReadingStore store;
  WorkletEnvironment env{&store, nullptr, nullptr, nullptr, nullptr, dir};
  const auto catalog = builtin_worklets(env);
  const json config = json::parse(R"({"workflows": [{
      "name": "load", "schedule": {"kind": "deterministic", "interval": "daily", "anchor": "2014-01-01T00:00:00Z"},
      "worklets": [{"type": "ingest_csv", "params": {"path": "in.csv"}},
                   {"type": "anonymize_csv", "params": {"input": "in.csv", "output": "out/anon.csv", "salt": "s"}},
                   {"type": "flush"}]}]})");
  const auto workflows = load_workflows(config, catalog);
  ASSERT_EQ(workflows.size(), 1u);
  const auto bad = run_workflow(workflows[0], RunContext{"load#1"});
  EXPECT_EQ(bad.status, RunStatus::failed);
  EXPECT_EQ(bad.failed_worklet, "ingest_csv");
  EXPECT_NE(bad.worklets[0].error.find("line 3"), std::string::npos);

  {
    std::ofstream csv(dir / "in.csv");
    csv << "meter_id,timestamp,kwh\nm1,2014-01-01T00:00:00Z,1.5\nm2,2014-01-01T00:00:00Z,2.5\n";
  }
  const auto first = run_workflow(workflows[0], RunContext{"load#2"});
  const auto second = run_workflow(workflows[0], RunContext{"load#3"});
  ASSERT_EQ(first.status, RunStatus::ok);
  for (std::size_t i = 0; i < first.worklets.size(); ++i) {
    EXPECT_EQ(first.worklets[i].digest, second.worklets[i].digest) << first.worklets[i].name;
    EXPECT_EQ(first.worklets[i].output, second.worklets[i].output);
  }
  EXPECT_EQ(store.row_count("m1") + store.row_count("m2"), 2u);
  const auto anon = ingest::parse_meter_csv(dir / "out" / "anon.csv").readings;
  ASSERT_EQ(anon.size(), 2u);
  EXPECT_EQ(anon[0].meter_id.rfind("anon_", 0), 0u);

  EXPECT_THROW((void)load_workflows(json::parse(R"({"workflows": [{"name": "x",
      "schedule": {"interval": "daily", "anchor": "2014-01-01T00:00:00Z"}, "worklets": [{"type": "nope"}]}]})"), catalog),
               Error);
  fs::remove_all(dir);
}
