#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int exit_code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(SMAS_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (const auto n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("smas_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string dd(const fs::path& dir) { return "--data-dir " + dir.string(); }

/// Parses `# name` sections of TSV output into header + rows.
std::map<std::string, std::vector<std::vector<std::string>>> parse_tsv(const std::string& text) {
  std::map<std::string, std::vector<std::vector<std::string>>> out;
  std::istringstream in(text);
  std::string line, current;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      current = line.substr(2);
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    if (!line.empty() && line.back() == '\t') cells.emplace_back();
    out[current].push_back(cells);
  }
  return out;
}

std::set<std::string> flagged_days(const json& counts, const std::string& column) {
  std::set<std::string> days;
  for (const auto& r : counts) {
    if (r[column].get<int>() > 0) days.insert(r["day"].get<std::string>());
  }
  return days;
}

}  // namespace

TEST(Cli, MissingDataFailsWithMessage) {
  const auto dir = fresh_dir("empty");
  EXPECT_NE(run(dd(dir) + " evaluate").exit_code, 0);
  EXPECT_NE(run(dd(dir) + " detect").exit_code, 0);
  EXPECT_NE(run(dd(dir) + " profile --meter nope").exit_code, 0);
  EXPECT_NE(run("").exit_code, 0);
  EXPECT_NE(run(dd(dir) + " frobnicate").exit_code, 0);
}

TEST(Cli, EvaluateFormatsAgreeAndParxWins) {
  const auto dir = fresh_dir("evaluate");
  ASSERT_EQ(run(dd(dir) + " generate --series 3 --days 240 --seed 9").exit_code, 0);
  const auto j = run(dd(dir) + " evaluate --refit-every 7 --format json");
  const auto t = run(dd(dir) + " --format tsv evaluate --refit-every 7");
  ASSERT_EQ(j.exit_code, 0);
  ASSERT_EQ(t.exit_code, 0);
  const auto doc = json::parse(j.out);
  const auto tsv = parse_tsv(t.out);
  const auto& summary = tsv.at("summary");
  ASSERT_EQ(summary.size(), 4u);
  ASSERT_EQ(doc["summary"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(summary[i + 1][0], doc["summary"][i]["method"].get<std::string>());
    EXPECT_EQ(std::stod(summary[i + 1][1]), doc["summary"][i]["mean_rmse"].get<double>());
  }
  const auto& meters = tsv.at("meters");
  for (std::size_t i = 0; i < doc["meters"].size(); ++i) {
    EXPECT_EQ(std::stod(meters[i + 1][1]), doc["meters"][i]["parx"].get<double>());
  }
  const double parx = doc["summary"][0]["mean_rmse"];
  EXPECT_LT(parx, doc["summary"][1]["mean_rmse"].get<double>());
  EXPECT_LT(parx, doc["summary"][2]["mean_rmse"].get<double>());
}

TEST(Cli, DetectThresholdsNestAndRepeat) {
  const auto dir = fresh_dir("detect");
  ASSERT_EQ(run(dd(dir) + " generate --series 8 --days 300 --seed 4 --anomalies 3 --anomaly-min-day 190").exit_code, 0);
  const auto a = run(dd(dir) + " --format json detect --train-days 182 --epsilon 0.1,0.01,0.001");
  ASSERT_EQ(a.exit_code, 0);
  const auto counts = json::parse(a.out)["daily_counts"];
  ASSERT_FALSE(counts.empty());
  for (const auto& r : counts) {
    EXPECT_GE(r["flagged_eps_0.1"].get<int>(), r["flagged_eps_0.01"].get<int>());
    EXPECT_GE(r["flagged_eps_0.01"].get<int>(), r["flagged_eps_0.001"].get<int>());
  }
  const auto loose = flagged_days(counts, "flagged_eps_0.1");
  const auto mid = flagged_days(counts, "flagged_eps_0.01");
  const auto tight = flagged_days(counts, "flagged_eps_0.001");
  EXPECT_TRUE(std::includes(loose.begin(), loose.end(), mid.begin(), mid.end()));
  EXPECT_TRUE(std::includes(mid.begin(), mid.end(), tight.begin(), tight.end()));
  EXPECT_FALSE(tight.empty());

  const auto b = run(dd(dir) + " --format json detect --train-days 182 --epsilon 0.1,0.01,0.001");
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(run(dd(dir) + " detect --epsilon 1.5").exit_code, 0);
}

TEST(Cli, WeekendHeavyGeneratorSpikesOnWeekends) {
  const auto dir = fresh_dir("weekend");
  ASSERT_EQ(run(dd(dir) + " generate --series 10 --days 300 --seed 5 --weekend-scale 2.5").exit_code, 0);
  const auto r = run(dd(dir) + " --format json detect --epsilon 0.01");
  ASSERT_EQ(r.exit_code, 0);
  double weekend = 0, weekday = 0, n_weekend = 0, n_weekday = 0;
  const auto doc = json::parse(r.out);
  for (const auto& row : doc["daily_counts"]) {
    const double c = row["flagged_eps_0.01"].get<int>();
    if (row["weekend"].get<bool>()) {
      weekend += c;
      ++n_weekend;
    } else {
      weekday += c;
      ++n_weekday;
    }
  }
  ASSERT_GT(n_weekend, 0);
  EXPECT_GT(weekend / n_weekend, 2.0 * weekday / n_weekday);
}

TEST(Cli, GenerateIsDeterministicPerSeed) {
  const auto a = fresh_dir("seed_a");
  const auto b = fresh_dir("seed_b");
  const auto c = fresh_dir("seed_c");
  ASSERT_EQ(run(dd(a) + " generate --series 2 --days 30 --seed 8 --csv out").exit_code, 0);
  ASSERT_EQ(run(dd(b) + " generate --series 2 --days 30 --seed 8 --csv out").exit_code, 0);
  ASSERT_EQ(run(dd(c) + " generate --series 2 --days 30 --seed 9 --csv out").exit_code, 0);
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(a / "out" / "meters.csv"), slurp(b / "out" / "meters.csv"));
  EXPECT_NE(slurp(a / "out" / "meters.csv"), slurp(c / "out" / "meters.csv"));
  EXPECT_EQ(slurp(a / "labels.json"), slurp(b / "labels.json"));

  // The CSV round-trips through ingest.
  ASSERT_EQ(run(dd(a) + " ingest --meters out/meters.csv --weather out/weather.csv").exit_code, 0);
  const auto fc = run(dd(a) + " --format json forecast --meter meter_00000 --horizon 24");
  ASSERT_EQ(fc.exit_code, 0);
  EXPECT_EQ(json::parse(fc.out)["forecast"].size(), 24u);
  EXPECT_NE(run(dd(a) + " ingest --meters out/meters.csv").exit_code, 0) << "duplicates are rejected";
  EXPECT_EQ(run(dd(a) + " ingest --meters out/meters.csv --upsert").exit_code, 0);
}

TEST(Cli, FitThenModelCommands) {
  const auto dir = fresh_dir("fit");
  ASSERT_EQ(run(dd(dir) + " generate --series 4 --days 200 --seed 2").exit_code, 0);
  EXPECT_NE(run(dd(dir) + " forecast --meter meter_00000 --method parx").exit_code, 0);
  EXPECT_NE(run(dd(dir) + " disaggregate --meter meter_00000").exit_code, 0);
  ASSERT_EQ(run(dd(dir) + " fit").exit_code, 0);
  EXPECT_EQ(run(dd(dir) + " forecast --meter meter_00000 --method parx --granularity daily --horizon 2").exit_code, 0);
  const auto dis = run(dd(dir) + " --format json disaggregate --meter meter_00001");
  ASSERT_EQ(dis.exit_code, 0);
  const auto doc = json::parse(dis.out);
  for (const auto& row : doc["disaggregation"]) {
    if (row["temp_dependent"].is_null()) continue;
    const double sum = row["temp_dependent"].get<double>() + row["temp_independent"].get<double>();
    EXPECT_GE(sum + 1e-9, row["observed"].get<double>());
  }
  const auto prof = run(dd(dir) + " --format json profile --meter meter_00002");
  ASSERT_EQ(prof.exit_code, 0);
  std::size_t hours = 0;
  const auto profile = json::parse(prof.out);
  for (const auto& b : profile["histogram"]) hours += b["count"].get<std::size_t>();
  EXPECT_EQ(hours, 200u * 24u);
  const auto seg = run(dd(dir) + " --format json segment --k 2 --seed 3");
  ASSERT_EQ(seg.exit_code, 0);
  EXPECT_EQ(json::parse(seg.out)["members"].size(), 4u);
  EXPECT_EQ(seg.out, run(dd(dir) + " --format json segment --k 2 --seed 3").out);
  EXPECT_NE(run(dd(dir) + " segment --k 5").exit_code, 0);
}

TEST(Cli, RunWorkflowsOnSimulatedClock) {
  const auto dir = fresh_dir("workflows");
  ASSERT_EQ(run(dd(dir) + " generate --series 2 --days 200 --seed 6").exit_code, 0);
  std::ofstream(dir / "workflows.json") << R"({"workflows": [
    {"name": "nightly", "schedule": {"kind": "deterministic", "interval": "daily", "anchor": "2014-07-01T02:00:00Z"},
     "worklets": [{"name": "fit", "type": "fit_models", "params": {}},
                  {"name": "detect", "type": "detect_anomalies", "params": {}}]}]})";
  const auto r = run(dd(dir) + " --format json run-workflows --simulated-clock 2014-07-01..2014-07-04T00:00:00Z 1h");
  ASSERT_EQ(r.exit_code, 0);
  const auto runs = json::parse(r.out)["runs"];
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[2]["scheduled_for"], "2014-07-03T02:00:00Z");
  for (const auto& x : runs) EXPECT_EQ(x["status"], "ok");
  EXPECT_TRUE(fs::exists(dir / "runs.jsonl"));
  EXPECT_NE(run(dd(dir) + " run-workflows --simulated-clock 2014-07-04..2014-07-01").exit_code, 0);
}
