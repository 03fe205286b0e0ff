// decoupled: run, sweep, benchmark and verify decoupled bandit policies.
//
//   decoupled run    --config exp.cfg --set horizon=5000 --output out/run.csv
//   decoupled sweep  --config exp.cfg --grid "policy=ftpl|ftrl" --out-dir out/
//   decoupled bench  --policies ftpl,ftrl --arms 2,4,8 --output bench.csv
//   decoupled verify --csv verify.csv
//   decoupled stats  --input out/run.csv --output out/run.stats.csv

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "decoupled/config.h"
#include "decoupled/harness.h"
#include "decoupled/verify.h"

namespace {

using decoupled::ExperimentConfig;

struct RunArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
};

std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw decoupled::ConfigError("expected key=value, got '" + text + "'");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

ExperimentConfig resolve_config(const RunArgs& args) {
  ExperimentConfig config;
  if (!args.config_path.empty()) config = decoupled::load_config(args.config_path);
  for (const auto& s : args.sets) {
    const auto [key, value] = split_assignment(s);
    config.set(key, value);
  }
  if (!args.output.empty()) config.output = args.output;
  config.validate();
  return config;
}

void add_run_options(CLI::App* app, RunArgs& args) {
  app->add_option("-c,--config", args.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  app->add_option("-s,--set", args.sets, "override a config key (key=value)");
  app->add_option("-o,--output", args.output, "CSV output path (default stdout)");
}

int do_run(const RunArgs& args) {
  const ExperimentConfig config = resolve_config(args);
  const auto records = decoupled::run_experiment(config);
  decoupled::save_run(config, records);
  if (!config.output.empty()) {
    const auto summary = decoupled::summarize(records);
    const auto& last = summary.back();
    std::cerr << config.experiment << ": " << decoupled::to_string(config.policy)
              << " on " << decoupled::to_string(config.env) << ", "
              << config.repetitions << " reps, mean regret at T=" << last.t << " is "
              << last.mean << " (sd " << last.sd << ") -> " << config.output << '\n';
  }
  return 0;
}

// Cartesian product over `key=v1|v2|...` grid entries.
int do_sweep(const RunArgs& args, const std::vector<std::string>& grid,
             const std::string& out_dir) {
  const ExperimentConfig base = resolve_config(args);
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& entry : grid) {
    const auto [key, values] = split_assignment(entry);
    auto list = decoupled::split_list(values, '|');
    if (list.empty()) throw decoupled::ConfigError("grid key '" + key + "' has no values");
    axes.emplace_back(key, std::move(list));
  }
  std::vector<std::size_t> index(axes.size(), 0);
  int runs = 0;
  while (true) {
    ExperimentConfig config = base;
    std::string tag = base.experiment;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& value = axes[a].second[index[a]];
      config.set(axes[a].first, value);
      std::string safe = value;
      for (char& ch : safe) {
        if (ch == ',' || ch == '/' || ch == ' ') ch = '_';
      }
      tag += "__" + axes[a].first + "-" + safe;
    }
    config.validate();
    config.output = (std::filesystem::path(out_dir) / (tag + ".csv")).string();
    const auto records = decoupled::run_experiment(config);
    decoupled::save_run(config, records);
    std::cerr << "wrote " << config.output << '\n';
    ++runs;

    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++index[a] < axes[a].second.size()) break;
      index[a] = 0;
    }
    if (a == axes.size()) break;
  }
  std::cerr << runs << " configuration(s) completed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoupled exploration/exploitation bandit experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run one experiment configuration");
  add_run_options(run, run_args);

  RunArgs sweep_args;
  std::vector<std::string> grid;
  std::string out_dir = "sweep";
  auto* sweep = app.add_subcommand("sweep", "cartesian product of configurations");
  sweep->add_option("-c,--config", sweep_args.config_path, "base config file")
      ->check(CLI::ExistingFile);
  sweep->add_option("-s,--set", sweep_args.sets, "override a base key (key=value)");
  sweep->add_option("-g,--grid", grid, "swept key with '|'-separated values")->required();
  sweep->add_option("-d,--out-dir", out_dir, "directory for per-configuration CSVs");

  decoupled::BenchConfig bench_config;
  std::string bench_policies = "ftpl,ftrl";
  std::string bench_arms = "2,4,8,16,32,64,128,256,512";
  std::string bench_output;
  auto* bench = app.add_subcommand("bench", "per-step runtime benchmark");
  bench->add_option("--policies", bench_policies, "comma-separated policy names");
  bench->add_option("--arms", bench_arms, "comma-separated arm counts");
  bench->add_option("--rounds", bench_config.rounds, "timed rounds per repetition")
      ->check(CLI::Range(std::int64_t{1000}, std::int64_t{1} << 40));
  bench->add_option("--warmup", bench_config.warmup, "untimed warm-up rounds");
  bench->add_option("--repetitions", bench_config.repetitions, "repetitions per cell");
  bench->add_option("--seed", bench_config.seed, "base seed");
  bench->add_option("-o,--output", bench_output, "CSV to append results to");

  decoupled::verify::VerifyOptions verify_options;
  std::string verify_csv;
  auto* verify = app.add_subcommand("verify", "run the oracle property suites");
  verify->add_option("--scale", verify_options.scale,
                     "multiplier on state and sample counts (1 = full)");
  verify->add_option("--seed-offset", verify_options.seed_offset, "shift every suite seed");
  verify->add_option("--csv", verify_csv, "also write the report as CSV");

  std::string stats_input;
  std::string stats_output;
  auto* stats = app.add_subcommand("stats", "mean and SD of regret per checkpoint");
  stats->add_option("-i,--input", stats_input, "run CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("-o,--output", stats_output, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(run_args);
    if (*sweep) return do_sweep(sweep_args, grid, out_dir);
    if (*bench) {
      bench_config.policies.clear();
      for (const auto& name : decoupled::split_list(bench_policies)) {
        bench_config.policies.push_back(decoupled::parse_policy(name));
      }
      bench_config.arm_grid.clear();
      for (double k : decoupled::parse_double_list(bench_arms)) {
        bench_config.arm_grid.push_back(static_cast<std::size_t>(k));
      }
      const auto rows = decoupled::bench_per_step(bench_config);
      std::cout << decoupled::bench_csv_header() << '\n';
      decoupled::write_bench_rows(std::cout, rows);
      if (!bench_output.empty()) decoupled::append_bench_csv(bench_output, rows);
      return 0;
    }
    if (*verify) {
      const auto results = decoupled::verify::run_all(verify_options);
      decoupled::verify::print_report(std::cout, results);
      if (!verify_csv.empty()) {
        std::ofstream out(verify_csv);
        if (!out) throw std::runtime_error("cannot open '" + verify_csv + "' for writing");
        decoupled::verify::write_report_csv(out, results);
      }
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
      return 0;
    }
    if (*stats) {
      std::ifstream in(stats_input);
      const auto records = decoupled::read_csv(in);
      if (records.empty()) throw std::runtime_error("no repetitions in '" + stats_input + "'");
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!stats_output.empty()) {
        file.open(stats_output);
        if (!file) throw std::runtime_error("cannot open '" + stats_output + "' for writing");
        out = &file;
      }
      *out << "t,mean,sd,count\n";
      for (const auto& p : decoupled::summarize(records)) {
        *out << p.t << ',' << decoupled::format_double(p.mean) << ','
             << decoupled::format_double(p.sd) << ',' << p.count << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
