#include "decoupled/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "decoupled/ebtc.h"
#include "decoupled/ftpl.h"
#include "decoupled/ftrl.h"
#include "decoupled/rng.h"

#ifndef DECOUPLED_GIT_REVISION
#define DECOUPLED_GIT_REVISION "unknown"
#endif

namespace decoupled {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kEnvStream = 0;
constexpr std::uint64_t kPolicyStream = 1;

std::string host_name() {
  std::ifstream in("/etc/hostname");
  std::string name;
  if (in && std::getline(in, name) && !name.empty()) return name;
  return "unknown";
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang-" + std::to_string(__clang_major__) + "." + std::to_string(__clang_minor__);
#elif defined(__GNUC__)
  return "gcc-" + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__);
#else
  return "unknown";
#endif
}

}  // namespace

double RunRecord::regret_at(std::int64_t t) const {
  const auto it = std::lower_bound(
      checkpoints.begin(), checkpoints.end(), t,
      [](const Checkpoint& c, std::int64_t value) { return c.t < value; });
  if (it == checkpoints.end() || it->t != t) {
    throw std::out_of_range("round " + std::to_string(t) + " is not a checkpoint");
  }
  return it->pseudo_regret;
}

std::vector<std::int64_t> checkpoint_grid(std::int64_t horizon) {
  std::vector<std::int64_t> grid;
  for (std::int64_t t = 1; t <= horizon; t *= 2) grid.push_back(t);
  for (std::int64_t k = 1; k <= 100; ++k) {
    // ceil(k * T / 100)
    grid.push_back(std::max<std::int64_t>(1, (k * horizon + 99) / 100));
  }
  grid.push_back(horizon);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& config,
                                    std::size_t num_arms) {
  const FtplParams ftpl{config.alpha, config.c, num_arms};
  const FtrlParams ftrl{config.beta, config.c, num_arms};
  switch (config.policy) {
    case PolicyKind::kFtpl:
      return std::make_unique<FtplPolicy>(ftpl);
    case PolicyKind::kFtrl:
      return std::make_unique<FtrlPolicy>(ftrl);
    case PolicyKind::kEbtc:
      return std::make_unique<EbTcPolicy>(num_arms);
    case PolicyKind::kMixedFtpl:
      return std::make_unique<MixedFtplPolicy>(FtplPolicy(ftpl), "mixed-ftpl");
    case PolicyKind::kMixedFtrl:
      return std::make_unique<MixedFtrlPolicy>(FtrlPolicy(ftrl), "mixed-ftrl");
  }
  throw std::logic_error("unhandled policy kind");
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& config) {
  switch (config.env) {
    case EnvKind::kStochastic:
      return std::make_unique<StochasticEnv>(config.means);
    case EnvKind::kAlternating:
      return std::make_unique<AlternatingAdversarialEnv>(
          config.arms, config.delta, config.growth, config.optimal_arm);
    case EnvKind::kSca:
      return std::make_unique<ScaEnv>(config.means, config.offset);
  }
  throw std::logic_error("unhandled environment kind");
}

RunRecord run_repetition(const ExperimentConfig& config, int repetition) {
  const auto env = make_environment(config);
  const std::size_t k = env->num_arms();
  const auto policy = make_policy(config, k);
  const auto rep = static_cast<std::uint64_t>(repetition);
  Rng env_rng(derive_seed(config.seed, rep, kEnvStream));
  Rng policy_rng(derive_seed(config.seed, rep, kPolicyStream));

  RunRecord record;
  record.repetition = repetition;
  const auto grid = checkpoint_grid(config.horizon);
  record.checkpoints.reserve(grid.size());
  auto next_checkpoint = grid.begin();

  RegretAccumulator regret(k);
  EnvironmentStep step;
  Clock::duration policy_time{};
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    env->step(t, env_rng, step);
    DecoupledAction action;
    if (config.time_steps) {
      const auto start = Clock::now();
      action = policy->act(policy_rng);
      policy->observe(action, step.losses[action.explore]);
      policy_time += Clock::now() - start;
    } else {
      action = policy->act(policy_rng);
      policy->observe(action, step.losses[action.explore]);
    }
    regret.record_round(step, action);
    if (t == *next_checkpoint) {
      record.checkpoints.push_back({t, regret.pseudo_regret()});
      ++next_checkpoint;
    }
  }
  if (config.time_steps) {
    record.ns_per_step =
        std::chrono::duration<double, std::nano>(policy_time).count() /
        static_cast<double>(config.horizon);
  }
  return record;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.env == EnvKind::kStochastic &&
      !StochasticEnv(config.means).has_unique_best()) {
    std::cerr << "warning: stochastic means have no unique best arm; regret is "
                 "measured against the lowest-index minimizer\n";
  }
  std::vector<RunRecord> records(static_cast<std::size_t>(config.repetitions));
  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(config.repetitions));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < config.repetitions; r = next++) {
      try {
        records[static_cast<std::size_t>(r)] = run_repetition(config, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::string csv_header(bool with_timing) {
  std::string header = "experiment,policy,env,repetition,t,pseudo_regret";
  if (with_timing) header += ",ns_per_step";
  return header;
}

void write_csv(std::ostream& out, const ExperimentConfig& config,
               const std::vector<RunRecord>& records) {
  const std::string prefix = config.experiment + "," +
                             std::string(to_string(config.policy)) + "," +
                             std::string(to_string(config.env)) + ",";
  out << csv_header(config.time_steps) << '\n';
  for (const auto& record : records) {
    for (const auto& c : record.checkpoints) {
      out << prefix << record.repetition << ',' << c.t << ','
          << format_double(c.pseudo_regret);
      if (config.time_steps) {
        out << ',' << format_double(record.ns_per_step.value_or(0.0));
      }
      out << '\n';
    }
  }
}

std::string git_revision() { return DECOUPLED_GIT_REVISION; }

void write_manifest(std::ostream& out, const ExperimentConfig& config) {
  out << "# resolved experiment configuration\n";
  for (const auto& [key, value] : config.to_pairs()) {
    out << key << " = " << value << '\n';
  }
  out << "git_revision = " << git_revision() << '\n';
}

void save_run(const ExperimentConfig& config, const std::vector<RunRecord>& records) {
  if (config.output.empty()) {
    write_csv(std::cout, config, records);
    return;
  }
  const std::filesystem::path path(config.output);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory '" +
                               path.parent_path().string() + "': " + ec.message());
    }
  }
  {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_csv(out, config, records);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  }
  const std::string manifest_path = path.string() + ".manifest";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw std::runtime_error("cannot open '" + manifest_path + "' for writing");
  write_manifest(manifest, config);
  if (!manifest) throw std::runtime_error("write failed for '" + manifest_path + "'");
}

std::vector<CurvePoint> summarize(const std::vector<RunRecord>& records) {
  std::vector<CurvePoint> out;
  if (records.empty()) return out;
  const auto& grid = records.front().checkpoints;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CurvePoint point;
    point.t = grid[i].t;
    double sum = 0.0;
    for (const auto& r : records) sum += r.checkpoints.at(i).pseudo_regret;
    point.count = static_cast<int>(records.size());
    point.mean = sum / point.count;
    double squares = 0.0;
    for (const auto& r : records) {
      const double d = r.checkpoints.at(i).pseudo_regret - point.mean;
      squares += d * d;
    }
    point.sd = std::sqrt(squares / point.count);
    out.push_back(point);
  }
  return out;
}

double mean_regret_at(const std::vector<RunRecord>& records, std::int64_t t) {
  double sum = 0.0;
  for (const auto& r : records) sum += r.regret_at(t);
  return sum / static_cast<double>(records.size());
}

double sd_regret_at(const std::vector<RunRecord>& records, std::int64_t t) {
  const double mean = mean_regret_at(records, t);
  double squares = 0.0;
  for (const auto& r : records) {
    const double d = r.regret_at(t) - mean;
    squares += d * d;
  }
  return std::sqrt(squares / static_cast<double>(records.size()));
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  const bool with_timing = line == csv_header(true);
  if (!with_timing && line != csv_header(false)) {
    throw std::runtime_error("unexpected CSV header: " + line);
  }
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_list(line);
    if (fields.size() != (with_timing ? 7u : 6u)) {
      throw std::runtime_error("malformed CSV row: " + line);
    }
    const int rep = std::stoi(fields[3]);
    if (records.empty() || records.back().repetition != rep) {
      records.push_back(RunRecord{rep, {}, std::nullopt});
    }
    records.back().checkpoints.push_back({std::stoll(fields[4]), std::stod(fields[5])});
    if (with_timing) records.back().ns_per_step = std::stod(fields[6]);
  }
  return records;
}

// -- Benchmark ----------------------------------------------------------------

std::vector<BenchRow> bench_per_step(const BenchConfig& config) {
  std::vector<BenchRow> rows;
  for (const PolicyKind kind : config.policies) {
    for (const std::size_t k : config.arm_grid) {
      ExperimentConfig exp;
      exp.policy = kind;
      exp.alpha = config.alpha;
      exp.beta = config.beta;
      exp.c = config.c;
      // Means spread evenly over [0.2, 0.8]; arm 0 is best.
      std::vector<double> means(k);
      for (std::size_t i = 0; i < k; ++i) {
        means[i] = k == 1 ? 0.5 : 0.2 + 0.6 * static_cast<double>(i) / static_cast<double>(k - 1);
      }
      const StochasticEnv env(means);
      const std::int64_t total_rounds = config.warmup + config.rounds;

      double total_ns = 0.0;
      for (int rep = 0; rep < config.repetitions; ++rep) {
        const auto seed_rep = static_cast<std::uint64_t>(rep);
        Rng env_rng(derive_seed(config.seed, seed_rep, kEnvStream));
        Rng policy_rng(derive_seed(config.seed, seed_rep, kPolicyStream));
        std::vector<double> losses(static_cast<std::size_t>(total_rounds) * k);
        EnvironmentStep step;
        for (std::int64_t t = 1; t <= total_rounds; ++t) {
          env.step(t, env_rng, step);
          std::copy(step.losses.begin(), step.losses.end(),
                    losses.begin() + static_cast<std::ptrdiff_t>((t - 1) * static_cast<std::int64_t>(k)));
        }
        const auto policy = make_policy(exp, k);
        auto loss_of = [&](std::int64_t t, ArmIndex arm) {
          return losses[static_cast<std::size_t>(t - 1) * k + arm];
        };
        for (std::int64_t t = 1; t <= config.warmup; ++t) {
          const auto action = policy->act(policy_rng);
          policy->observe(action, loss_of(t, action.explore));
        }
        const auto start = Clock::now();
        for (std::int64_t t = config.warmup + 1; t <= total_rounds; ++t) {
          const auto action = policy->act(policy_rng);
          policy->observe(action, loss_of(t, action.explore));
        }
        total_ns += std::chrono::duration<double, std::nano>(Clock::now() - start).count();
      }
      rows.push_back({std::string(to_string(kind)), k,
                      total_ns / (static_cast<double>(config.rounds) * config.repetitions),
                      config.rounds, config.repetitions});
    }
  }
  return rows;
}

std::string bench_csv_header() {
  return "policy,K,ns_per_step,rounds,repetitions,host,compiler";
}

void write_bench_rows(std::ostream& out, const std::vector<BenchRow>& rows) {
  const std::string host = host_name();
  const std::string compiler = compiler_id();
  for (const auto& row : rows) {
    out << row.policy << ',' << row.num_arms << ',' << format_double(row.ns_per_step)
        << ',' << row.rounds << ',' << row.repetitions << ',' << host << ','
        << compiler << '\n';
  }
}

void append_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for appending");
  if (fresh) out << bench_csv_header() << '\n';
  write_bench_rows(out, rows);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

double loglog_slope(const std::vector<BenchRow>& rows, std::string_view policy) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& row : rows) {
    if (row.policy != policy) continue;
    const double x = std::log(static_cast<double>(row.num_arms));
    const double y = std::log(row.ns_per_step);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("slope needs at least two grid points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace decoupled
