#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "decoupled/config.h"
#include "decoupled/harness.h"
#include "doctest.h"

using namespace decoupled;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.experiment = "unit";
  config.horizon = 300;
  config.repetitions = 4;
  config.seed = 99;
  config.threads = 2;
  return config;
}

std::string csv_of(const ExperimentConfig& config) {
  std::ostringstream out;
  write_csv(out, config, run_experiment(config));
  return out.str();
}

}  // namespace

TEST_CASE("one round with one arm has zero regret") {
  ExperimentConfig config = small_config();
  config.means = {0.5};
  config.horizon = 1;
  config.repetitions = 1;
  const auto records = run_experiment(config);
  REQUIRE(records.size() == 1);
  CHECK(records[0].checkpoints.back().t == 1);
  CHECK(records[0].checkpoints.back().pseudo_regret == 0.0);
}

TEST_CASE("identical seeds give byte-identical CSV for every policy and env") {
  for (auto policy : {PolicyKind::kFtpl, PolicyKind::kFtrl, PolicyKind::kEbtc,
                      PolicyKind::kMixedFtpl, PolicyKind::kMixedFtrl}) {
    for (auto env : {EnvKind::kStochastic, EnvKind::kAlternating, EnvKind::kSca}) {
      ExperimentConfig config = small_config();
      config.policy = policy;
      config.env = env;
      const std::string a = csv_of(config);
      config.threads = 1;
      const std::string b = csv_of(config);
      CHECK(a == b);
      config.seed = 100;
      CHECK(csv_of(config) != a);
    }
  }
}

TEST_CASE("CSV layout and round trip") {
  ExperimentConfig config = small_config();
  const auto records = run_experiment(config);
  std::ostringstream out;
  write_csv(out, config, records);
  const std::string text = out.str();
  CHECK(text.rfind("experiment,policy,env,repetition,t,pseudo_regret\n", 0) == 0);
  CHECK(text.find("\nunit,ftpl,stochastic,0,1,") != std::string::npos);

  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.size() == records.size());
  for (std::size_t r = 0; r < back.size(); ++r) {
    CHECK(back[r].repetition == records[r].repetition);
    REQUIRE(back[r].checkpoints.size() == records[r].checkpoints.size());
    for (std::size_t i = 0; i < back[r].checkpoints.size(); ++i) {
      CHECK(back[r].checkpoints[i].pseudo_regret == records[r].checkpoints[i].pseudo_regret);
    }
  }

  config.time_steps = true;
  std::ostringstream timed;
  write_csv(timed, config, run_experiment(config));
  CHECK(timed.str().rfind(csv_header(true) + "\n", 0) == 0);
}

TEST_CASE("checkpoint grid") {
  const auto grid = checkpoint_grid(1000);
  CHECK(grid.front() == 1);
  CHECK(grid.back() == 1000);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  for (std::int64_t t : {2, 512, 10, 500}) {
    CHECK(std::find(grid.begin(), grid.end(), t) != grid.end());
  }
  CHECK(checkpoint_grid(1) == std::vector<std::int64_t>{1});
}

TEST_CASE("regret is non-decreasing along checkpoints") {
  ExperimentConfig config = small_config();
  for (const auto& r : run_experiment(config)) {
    for (std::size_t i = 1; i < r.checkpoints.size(); ++i) {
      CHECK(r.checkpoints[i].pseudo_regret >= r.checkpoints[i - 1].pseudo_regret - 1e-9);
    }
  }
}

TEST_CASE("summary statistics") {
  std::vector<RunRecord> records = {{0, {{1, 1.0}, {2, 3.0}}, std::nullopt},
                                    {1, {{1, 3.0}, {2, 3.0}}, std::nullopt}};
  const auto summary = summarize(records);
  REQUIRE(summary.size() == 2);
  CHECK(summary[0].mean == 2.0);
  CHECK(summary[0].sd == 1.0);
  CHECK(summary[1].sd == 0.0);
  CHECK(mean_regret_at(records, 2) == 3.0);
  CHECK(sd_regret_at(records, 1) == 1.0);

  records.pop_back();
  CHECK(summarize(records)[0].sd == 0.0);  // a single repetition has zero spread
}

TEST_CASE("config errors name the offending field") {
  auto message_of = [](auto&& fn) -> std::string {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.what();
    }
    return {};
  };
  ExperimentConfig config;
  config.horizon = 0;
  CHECK(message_of([&] { config.validate(); }).find("horizon") != std::string::npos);
  config = {};
  config.means = {0.2, 1.5};
  CHECK(message_of([&] { config.validate(); }).find("means") != std::string::npos);
  config = {};
  config.alpha = 1.0;
  CHECK(message_of([&] { config.validate(); }).find("alpha") != std::string::npos);
  config = {};
  config.experiment = "a,b";
  CHECK(message_of([&] { config.validate(); }).find("experiment") != std::string::npos);
  CHECK(message_of([&] { config.set("delta", "abc"); }).find("delta") != std::string::npos);
  CHECK(message_of([&] { config.set("bogus", "1"); }).find("bogus") != std::string::npos);
  CHECK_THROWS_AS(config.set("policy", "ucb"), ConfigError);
}

TEST_CASE("config text round trip") {
  std::istringstream in(
      "# comment\n"
      "experiment = stochastic\n"
      "policy = mixed-ftrl\n"
      "means = 0.1, 0.2,0.3\n"
      "T = 500   # trailing comment\n"
      "\n"
      "seed = 12\n");
  ExperimentConfig config;
  apply_pairs(config, parse_key_values(in));
  CHECK(config.policy == PolicyKind::kMixedFtrl);
  CHECK(config.means == std::vector<double>{0.1, 0.2, 0.3});
  CHECK(config.horizon == 500);
  CHECK(config.seed == 12);

  std::ostringstream text;
  for (const auto& [k, v] : config.to_pairs()) text << k << " = " << v << '\n';
  std::istringstream again(text.str());
  ExperimentConfig copy;
  apply_pairs(copy, parse_key_values(again));
  CHECK(copy.to_pairs() == config.to_pairs());
}

TEST_CASE("save_run writes the CSV and manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "decoupled_harness_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig config = small_config();
  config.output = (dir / "nested" / "run.csv").string();
  save_run(config, run_experiment(config));
  CHECK(std::filesystem::exists(config.output));
  std::ifstream manifest(config.output + ".manifest");
  std::stringstream buffer;
  buffer << manifest.rdbuf();
  CHECK(buffer.str().find("git_revision = ") != std::string::npos);
  CHECK(buffer.str().find("horizon = 300") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark emits one row per cell") {
  BenchConfig config;
  config.policies = {PolicyKind::kFtpl};
  config.arm_grid = {4};
  config.rounds = 1000;
  config.warmup = 10;
  config.repetitions = 1;
  const auto rows = bench_per_step(config);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].policy == "ftpl");
  CHECK(rows[0].num_arms == 4);
  CHECK(rows[0].ns_per_step > 0.0);
  std::ostringstream out;
  write_bench_rows(out, rows);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
}

TEST_CASE("log-log slope of an exact power law") {
  std::vector<BenchRow> rows;
  for (std::size_t k : {2u, 4u, 8u, 16u}) {
    rows.push_back({"x", k, 3.0 * static_cast<double>(k * k), 1000, 1});
  }
  CHECK(loglog_slope(rows, "x") == doctest::Approx(2.0).epsilon(1e-12));
}
