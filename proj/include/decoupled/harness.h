#ifndef DECOUPLED_HARNESS_H_
#define DECOUPLED_HARNESS_H_

// Experiment runner, CSV/manifest persistence and the per-step benchmark.
//
// CSV schema (one row per checkpoint):
//   experiment,policy,env,repetition,t,pseudo_regret[,ns_per_step]
// The ns_per_step column is present only when step timing is enabled.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decoupled/config.h"
#include "decoupled/core.h"
#include "decoupled/environment.h"

namespace decoupled {

struct Checkpoint {
  std::int64_t t = 0;
  double pseudo_regret = 0.0;
};

struct RunRecord {
  int repetition = 0;
  std::vector<Checkpoint> checkpoints;
  std::optional<double> ns_per_step;

  // Regret at checkpoint t; throws std::out_of_range if t is not on the grid.
  double regret_at(std::int64_t t) const;
};

// {1, 2, 4, ...} plus 100 evenly spaced rounds plus T, sorted and unique.
std::vector<std::int64_t> checkpoint_grid(std::int64_t horizon);

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config,
                                    std::size_t num_arms);
std::unique_ptr<Environment> make_environment(const ExperimentConfig& config);

// One repetition with seeds derived from (config.seed, repetition).
RunRecord run_repetition(const ExperimentConfig& config, int repetition);

// All repetitions, fanned out over config.threads workers. Output is ordered
// by repetition index.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

std::string csv_header(bool with_timing);
void write_csv(std::ostream& out, const ExperimentConfig& config,
               const std::vector<RunRecord>& records);
// Resolved config plus the build's git revision, as `key = value` lines.
void write_manifest(std::ostream& out, const ExperimentConfig& config);
std::string git_revision();

// Writes `<output>` and `<output>.manifest`; I/O errors name the path.
void save_run(const ExperimentConfig& config, const std::vector<RunRecord>& records);

// Mean and per-repetition standard deviation (population form, so a single
// repetition gives 0) of pseudo-regret at each checkpoint.
struct CurvePoint {
  std::int64_t t = 0;
  double mean = 0.0;
  double sd = 0.0;
  int count = 0;
};
std::vector<CurvePoint> summarize(const std::vector<RunRecord>& records);
double mean_regret_at(const std::vector<RunRecord>& records, std::int64_t t);
double sd_regret_at(const std::vector<RunRecord>& records, std::int64_t t);

// Reads a CSV written by write_csv back into records (single experiment).
std::vector<RunRecord> read_csv(std::istream& in);

struct BenchConfig {
  std::vector<PolicyKind> policies = {PolicyKind::kFtpl, PolicyKind::kFtrl};
  std::vector<std::size_t> arm_grid = {2, 4, 8, 16, 32, 64, 128, 256, 512};
  std::int64_t rounds = 2000;
  std::int64_t warmup = 200;
  int repetitions = 5;
  std::uint64_t seed = 7;
  double alpha = 3.0;
  double beta = 2.0 / 3.0;
  double c = 2.0;
};

struct BenchRow {
  std::string policy;
  std::size_t num_arms = 0;
  double ns_per_step = 0.0;
  std::int64_t rounds = 0;
  int repetitions = 0;
};

// Mean wall-clock nanoseconds of act()+observe() per round on a synthetic
// stochastic instance. Losses are pre-drawn so environment sampling is not
// timed; warm-up rounds are excluded.
std::vector<BenchRow> bench_per_step(const BenchConfig& config);
std::string bench_csv_header();
void write_bench_rows(std::ostream& out, const std::vector<BenchRow>& rows);
// Appends to `path`, writing the header only if the file is new or empty.
void append_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

// Least-squares slope of log(ns_per_step) against log(K) for one policy.
double loglog_slope(const std::vector<BenchRow>& rows, std::string_view policy);

}  // namespace decoupled

#endif  // DECOUPLED_HARNESS_H_
