#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "rblspi/harness/chain_report.hpp"
#include "rblspi/harness/experiment.hpp"
#include "support/oracles.hpp"

using namespace rblspi;
namespace fs = std::filesystem;

namespace {

nlohmann::json small_config() {
  return nlohmann::json::parse(R"({
    "schema_version": 1,
    "name": "small",
    "env": {"name": "mountain_car"},
    "features": {"kind": "rbf_grid", "grid": [3]},
    "agent": {"name": "rblspi", "alpha": 0.1, "beta": 0.1, "k_interval": 20},
    "runs": 3,
    "episodes": 12,
    "window": 4,
    "base_seed": 100
  })");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rblspi_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RBLSPI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---- config -----------------------------------------------------------------

TEST(Config, ParsesAndFillsDefaults) {
  const auto c = parse_config(small_config());
  EXPECT_EQ(c.env.name, "mountain_car");
  EXPECT_EQ(c.features.grid, std::vector<int>{3});
  EXPECT_EQ(c.runs, 3u);
  EXPECT_EQ(c.agent.epsilon_decay, 0.997);
  EXPECT_EQ(c.workers, 1u);
  const auto env = make_environment("mountain_car", false, 0);
  EXPECT_EQ(make_feature_map(c.features, env->spec()).k(), 3 * 10);
}

TEST(Config, UnknownKeysRejected) {
  for (const char* path : {"/typo", "/env/typo", "/agent/typo", "/features/typo"}) {
    auto j = small_config();
    j[nlohmann::json::json_pointer(path)] = 1;
    EXPECT_THROW(parse_config(j), ConfigError) << path;
  }
}

TEST(Config, SchemaVersionRequired) {
  auto j = small_config();
  j["schema_version"] = 2;
  EXPECT_THROW(parse_config(j), ConfigError);
  j.erase("schema_version");
  EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, ValueChecks) {
  auto expect_bad = [](const std::string& pointer, const nlohmann::json& value) {
    auto j = small_config();
    j[nlohmann::json::json_pointer(pointer)] = value;
    EXPECT_THROW(parse_config(j), ConfigError) << pointer << " = " << value.dump();
  };
  expect_bad("/runs", 0);
  expect_bad("/runs", -3);
  expect_bad("/episodes", "many");
  expect_bad("/env/name", "acrobot");
  expect_bad("/env/name", "chain_walk");
  expect_bad("/agent/name", "sarsa");
  expect_bad("/agent/alpha", 0.0);
  expect_bad("/agent/beta", -1.0);
  expect_bad("/agent/k_interval", 0);
  expect_bad("/agent/epsilon0", 1.5);
  expect_bad("/features/kind", "tiles");
  expect_bad("/features/grid", nlohmann::json::array({3, 3, 3}));
  expect_bad("/sweep/alpha", nlohmann::json::array({0.1, -0.1}));
  expect_bad("/sweep/k_interval", nlohmann::json::array({0}));
  auto sparse_cart = small_config();
  sparse_cart["env"] = {{"name", "cart_pole"}, {"sparse", true}};
  EXPECT_THROW(parse_config(sparse_cart), ConfigError);
}

TEST(Config, CartPoleWithBroadcastGridIsValid) {
  auto j = small_config();
  j["env"] = {{"name", "cart_pole"}};
  EXPECT_NO_THROW(parse_config(j));
  const auto c = parse_config(j);
  EXPECT_EQ(resolve_grid(c.features, 4), (std::vector<int>{3, 3, 3, 3}));
}

TEST(Config, LoadErrors) {
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
  const auto dir = temp_dir("cfg");
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
  fs::remove_all(dir);
}

TEST(Config, SweepCartesianProduct) {
  auto j = small_config();
  j["sweep"] = {{"k_interval", {10, 20}}, {"alpha", {0.1, 1.0, 10.0}}};
  const auto pts = sweep_points(parse_config(j));
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0].k_interval, 10u);
  EXPECT_EQ(pts[0].alpha, 0.1);
  EXPECT_EQ(pts[5].k_interval, 20u);
  EXPECT_EQ(pts[5].alpha, 10.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i].id, i);
    EXPECT_EQ(pts[i].beta, 0.1);
  }
}

// ---- aggregation --------------------------------------------------------------

TEST(Aggregate, PercentileInterpolation) {
  EXPECT_EQ(percentile({3, 1, 2}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.05), 0.5);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 0.95), 9.5);
  EXPECT_EQ(percentile({7}, 0.95), 7.0);
  EXPECT_THROW(percentile({}, 0.5), InvalidArgument);
}

TEST(Aggregate, BlocksDropPartialTail) {
  EXPECT_EQ(block_means({1, 2, 3, 4, 5, 6, 7}, 3), (std::vector<double>{2, 5}));
  EXPECT_TRUE(block_means({1, 2}, 3).empty());
  EXPECT_THROW(block_means({1}, 0), InvalidArgument);
}

TEST(Aggregate, SingleRun) {
  const auto s = aggregate_runs({{1, 2, 3, 4, 10, 20}}, 2, "steps");
  ASSERT_EQ(s.windows.size(), 3u);
  EXPECT_EQ(s.windows[0].mean, 1.5);
  EXPECT_EQ(s.windows[2].mean, 15.0);
  for (const auto& w : s.windows) {
    EXPECT_EQ(w.ci95, 0.0);
    EXPECT_EQ(w.p5, w.mean);
    EXPECT_EQ(w.p95, w.mean);
  }
}

TEST(Aggregate, ConstantMetric) {
  const std::vector<std::vector<double>> runs(4, std::vector<double>(10, 7.5));
  for (const auto& w : aggregate_runs(runs, 5, "steps").windows) {
    EXPECT_EQ(w.mean, 7.5);
    EXPECT_EQ(w.p5, 7.5);
    EXPECT_EQ(w.p95, 7.5);
    EXPECT_EQ(w.ci95, 0.0);
  }
}

TEST(Aggregate, HandComputedWindow) {
  // Window means across runs: 1, 2, 3, 6. Mean 3, sample sd sqrt(14/3).
  const auto s = aggregate_runs({{1}, {2}, {3}, {6}}, 1, "steps");
  EXPECT_DOUBLE_EQ(s.windows[0].mean, 3.0);
  EXPECT_NEAR(s.windows[0].ci95, 1.96 * std::sqrt(14.0 / 3.0) / 2.0, 1e-14);
  EXPECT_NEAR(s.windows[0].p5, 1.15, 1e-14);
  EXPECT_NEAR(s.windows[0].p95, 5.55, 1e-14);
}

TEST(Aggregate, ConfidenceIntervalCoverage) {
  SeededRng rng(1);
  const double mu = 4.0, sigma = 2.5;
  const int runs = 50, trials = 1000;
  int covered = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<double>> data;
    for (int r = 0; r < runs; ++r) data.push_back({rng.normal(mu, sigma)});
    const auto w = aggregate_runs(data, 1, "x").windows[0];
    EXPECT_GE(w.ci95, 0.0);
    EXPECT_LE(w.p5, w.p95);
    covered += std::abs(w.mean - mu) <= w.ci95;
  }
  const double rate = static_cast<double>(covered) / trials;
  // Binomial sd at 1000 trials is about 0.007.
  EXPECT_NEAR(rate, 0.95, 0.025);
}

// ---- CSV ----------------------------------------------------------------------------

TEST(Csv, RawRoundTrip) {
  std::vector<RawRow> rows{{1, 0, 0, 500, -500.0, false}, {0, 0, 1, 120, -119.0, true}, {0, 0, 0, 3, 0.1, true}};
  std::ostringstream out;
  write_raw_csv(out, rows);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kRawHeader);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream in(text);
  auto back = read_raw_csv(in);
  canonicalise(rows);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].run_id, rows[i].run_id);
    EXPECT_EQ(back[i].episode, rows[i].episode);
    EXPECT_EQ(back[i].steps, rows[i].steps);
    EXPECT_EQ(back[i].undiscounted_return, rows[i].undiscounted_return);
    EXPECT_EQ(back[i].reached_goal, rows[i].reached_goal);
  }
  // Canonical order is (sweep, run, episode).
  EXPECT_EQ(back[0].run_id, 0u);
  EXPECT_EQ(back[0].episode, 0u);
  EXPECT_EQ(back[2].run_id, 1u);
}

TEST(Csv, AggregateRoundTripIsExact) {
  std::vector<AggregateRow> rows{{0, 0, {1.0 / 3.0, 0.1, -2e-300, 1e300}}, {0, 1, {2.5, 0.0, 2.5, 2.5}}};
  std::ostringstream out;
  write_aggregate_csv(out, rows);
  std::istringstream in(out.str());
  const auto back = read_aggregate_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].stats.mean, 1.0 / 3.0);
  EXPECT_EQ(back[0].stats.p5, -2e-300);
  EXPECT_EQ(back[0].stats.p95, 1e300);
}

TEST(Csv, HeaderRequiredAndMalformedRowsRejected) {
  std::istringstream no_header("0,0,0,1,1,1\n");
  EXPECT_THROW(read_raw_csv(no_header), IoError);
  std::istringstream short_row(std::string(kRawHeader) + "\n0,0,0\n");
  EXPECT_THROW(read_raw_csv(short_row), IoError);
  std::istringstream bad_number(std::string(kAggregateHeader) + "\n0,0,x,0,0,0\n");
  EXPECT_THROW(read_aggregate_csv(bad_number), IoError);
}

// ---- experiments ------------------------------------------------------------------

TEST(Experiment, DeterministicAndWorkerIndependent) {
  const auto c = parse_config(small_config());
  const auto a = run_experiment(c, 1);
  const auto b = run_experiment(c, 1);
  const auto threaded = run_experiment(c, 3);
  EXPECT_EQ(raw_csv_text(a), raw_csv_text(b));
  EXPECT_EQ(raw_csv_text(a), raw_csv_text(threaded));
  EXPECT_EQ(aggregate_csv_text(a), aggregate_csv_text(threaded));
  EXPECT_EQ(a.raw.size(), 3u * 12u);
}

TEST(Experiment, RunsUseDistinctSeeds) {
  auto j = small_config();
  j["env"] = {{"name", "puddle_world"}};
  const auto c = parse_config(j);
  const auto r = run_experiment(c, 1);
  const auto table = metric_table(r.raw, 0, true);
  ASSERT_EQ(table.size(), 3u);
  EXPECT_NE(table[0], table[1]);
  EXPECT_EQ(run_seed(c, 2), 102u);
}

TEST(Experiment, AggregateRecomputedFromRawMatches) {
  auto j = small_config();
  j["sweep"] = {{"k_interval", {10, 30}}};
  const auto c = parse_config(j);
  const auto r = run_experiment(c, 2);
  std::istringstream raw_in(raw_csv_text(r));
  const auto raw = read_raw_csv(raw_in);
  std::ostringstream again;
  write_aggregate_csv(again, aggregate_from_raw(raw, false, c.window, "steps"));
  EXPECT_EQ(again.str(), aggregate_csv_text(r));
}

TEST(Experiment, SweepIsolation) {
  auto both = small_config();
  both["sweep"] = {{"k_interval", {10, 20}}};
  auto alone = small_config();
  alone["sweep"] = {{"k_interval", {20}}};
  const auto rb = run_experiment(parse_config(both), 1);
  const auto ra = run_experiment(parse_config(alone), 1);
  EXPECT_EQ(metric_table(rb.raw, 1, false), metric_table(ra.raw, 0, false));
  EXPECT_EQ(metric_table(rb.raw, 1, true), metric_table(ra.raw, 0, true));
}

TEST(Experiment, MetricChoice) {
  EXPECT_EQ(metric_name("puddle_world"), "undiscounted_return");
  for (const char* n : {"mountain_car", "inverted_pendulum", "cart_pole"}) EXPECT_EQ(metric_name(n), "steps");
  auto j = small_config();
  j["env"] = {{"name", "puddle_world"}};
  j["episodes"] = 4;
  j["window"] = 2;
  const auto r = run_experiment(parse_config(j), 1);
  const auto returns = metric_table(r.raw, 0, true);
  EXPECT_EQ(r.aggregates.at(0).metric, "undiscounted_return");
  EXPECT_DOUBLE_EQ(r.aggregates.at(0).windows[0].mean,
                   (returns[0][0] + returns[0][1] + returns[1][0] + returns[1][1] + returns[2][0] + returns[2][1]) / 6.0);
}

TEST(Experiment, BaselineAndOfflineAgentsRun) {
  for (const char* agent : {"online_lspi", "lspi", "blspi"}) {
    auto j = small_config();
    j["agent"] = {{"name", agent}, {"samples", 400}};
    j["episodes"] = 4;
    j["runs"] = 2;
    j["window"] = 2;
    const auto r = run_experiment(parse_config(j), 1);
    EXPECT_EQ(r.raw.size(), 8u) << agent;
    for (const auto& row : r.raw) EXPECT_LE(row.steps, 500u);
  }
}

TEST(Experiment, WritesOutputs) {
  const auto dir = temp_dir("out");
  auto j = small_config();
  j["sweep"] = {{"beta", {0.1, 1.0}}};
  const auto c = parse_config(j);
  const auto r = run_experiment(c, 1);
  write_outputs(c, r, dir);
  EXPECT_EQ(read_file(dir / "raw.csv"), raw_csv_text(r));
  EXPECT_EQ(read_file(dir / "aggregate.csv"), aggregate_csv_text(r));
  EXPECT_TRUE(fs::exists(dir / "sweep_0.svg"));
  EXPECT_TRUE(fs::exists(dir / "sweep_1.svg"));
  EXPECT_EQ(read_file(dir / "sweeps.csv"), "sweep_id,agent,k_interval,alpha,beta\n0,rblspi,20,0.1,0.1\n1,rblspi,20,0.1,1\n");
  fs::remove_all(dir);
}

// ---- plotting ---------------------------------------------------------------------------

namespace {

AggregateSeries synthetic_series() {
  AggregateSeries s;
  s.metric = "steps";
  s.window = 100;
  for (int i = 0; i < 6; ++i) {
    const double m = 400.0 / (1 + i);
    s.windows.push_back({m, 10.0 + i, m - 40.0, m + 60.0});
  }
  return s;
}

}  // namespace

TEST(Plot, GoldenFile) {
  AggregateSeries other = synthetic_series();
  for (auto& w : other.windows) {
    w.mean *= 0.5;
    w.p5 *= 0.5;
    w.p95 *= 0.5;
  }
  const std::string svg = render_svg({{"K=20", synthetic_series()}, {"K=50 <b>", other}}, "mountain car & friends");
  const std::string golden = read_file(fs::path(RBLSPI_TEST_DATA_DIR) / "golden_plot.svg");
  EXPECT_EQ(svg, golden);
}

TEST(Plot, DeterministicAndLabelled) {
  AggregateSeries s = synthetic_series();
  s.metric = "undiscounted_return";
  const std::string a = render_svg({{"run", s}}, "t"), b = render_svg({{"run", s}}, "t");
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find(">undiscounted_return</text>"), std::string::npos);
  EXPECT_NE(a.find(">episodes</text>"), std::string::npos);
}

TEST(Plot, SingleWindowDrawsOnePointWithBar) {
  AggregateSeries s;
  s.metric = "steps";
  s.windows.push_back({100, 5, 90, 110});
  const std::string svg = render_svg({{"one", s}});
  std::size_t circles = 0;
  for (std::size_t p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++circles;
  EXPECT_EQ(circles, 1u);
  EXPECT_NE(svg.find("stroke=\"#1f77b4\"/>"), std::string::npos);
}

TEST(Plot, Errors) {
  EXPECT_THROW(render_svg({}), InvalidArgument);
  EXPECT_THROW(render_svg({{"empty", AggregateSeries{}}}), InvalidArgument);
  EXPECT_THROW(plot({{"x", synthetic_series()}}, "/nonexistent/dir/x.svg"), IoError);
}

// ---- chain report -------------------------------------------------------------------------

TEST(ChainReport, FinalPolicyAndIterationCount) {
  ChainReportConfig cfg;
  cfg.seed = 3;
  const auto r = chain_walk_report(cfg);
  ASSERT_EQ(r.traces.size(), 2u);
  for (const auto& t : r.traces) {
    EXPECT_TRUE(t.result.converged);
    EXPECT_LE(t.result.iterations, 10);
    ASSERT_FALSE(t.iterations.empty());
    EXPECT_EQ(t.iterations.back().policy, "LLLLLLLLLLRRRRRRRRRR");
    EXPECT_EQ(t.iterations.size(), static_cast<std::size_t>(t.result.iterations));
    for (const auto& it : t.iterations) {
      EXPECT_EQ(it.value.size(), 20u);
      EXPECT_EQ(it.exact_value.size(), 20u);
    }
  }
}

TEST(ChainReport, ExactValuesTwoStateToy) {
  // Deterministic swap between two states, reward 1 in the first, γ = 0.5:
  // V1 = 1 + V2/2, V2 = V1/2  ->  V1 = 4/3, V2 = 2/3.
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  Vector r(2);
  r << 1, 0;
  const Vector v = exact_values(p, r, 0.5);
  EXPECT_NEAR(v[0], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(v[1], 2.0 / 3.0, 1e-15);
}

TEST(ChainReport, ExactColumnMatchesValueIteration) {
  const auto policy = optimal_chain_policy();
  const auto v = exact_chain_values(policy);
  const auto q = oracle::chain_value_iteration(policy, 0.9, 400);
  for (int s = 0; s < 20; ++s)
    EXPECT_NEAR(v[static_cast<std::size_t>(s)], q[static_cast<std::size_t>(2 * s + policy[static_cast<std::size_t>(s)])], 1e-10);
}

TEST(ChainReport, OptimalPolicyMatchesValueIteration) {
  const auto q = oracle::chain_optimal_q(0.9, 500);
  std::vector<int> best;
  for (int s = 0; s < 20; ++s) best.push_back(q[static_cast<std::size_t>(2 * s + 1)] > q[static_cast<std::size_t>(2 * s)] ? 1 : 0);
  EXPECT_EQ(best, optimal_chain_policy());
  EXPECT_EQ(exact_greedy(optimal_chain_policy()), optimal_chain_policy());
}

TEST(ChainReport, CsvShape) {
  ChainReportConfig cfg;
  cfg.seed = 4;
  const auto r = chain_walk_report(cfg);
  const std::string csv = chain_report_csv(r);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  std::size_t expect = 1;
  for (const auto& t : r.traces) expect += 20 * t.iterations.size();
  EXPECT_EQ(lines, expect);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "algorithm,iteration,state,action,exact_action,value,exact_value");
}

// ---- command line ----------------------------------------------------------------------------

TEST(Cli, ExitCodes) {
  const auto dir = temp_dir("cli");
  std::ofstream(dir / "ok.json") << small_config().dump();
  auto bad = small_config();
  bad["extra"] = true;
  std::ofstream(dir / "bad.json") << bad.dump();
  EXPECT_EQ(run_cli("validate " + (dir / "ok.json").string()), 0);
  EXPECT_EQ(run_cli("validate " + (dir / "bad.json").string()), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("plot " + (dir / "missing.csv").string() + " " + (dir / "x.svg").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "ok.json").string() + " --out " + (dir / "out").string() + " --seed 5"), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "raw.csv"));
  EXPECT_EQ(run_cli("plot " + (dir / "out" / "aggregate.csv").string() + " " + (dir / "p.svg").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "p.svg"));
  EXPECT_EQ(run_cli("chain --seed 2 --out " + (dir / "chain").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "chain" / "chain_report.csv"));
  fs::remove_all(dir);
}

TEST(Cli, ShippedConfigsValidate) {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(RBLSPI_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_EQ(run_cli("validate " + entry.path().string()), 0) << entry.path();
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5u);
}
