#ifndef DECOUPLED_VERIFY_H_
#define DECOUPLED_VERIFY_H_

// Seeded property suites that pit the policies against the oracles. Each
// suite aggregates its own failures instead of stopping at the first one.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "decoupled/core.h"

namespace decoupled::verify {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::string summary;
  std::vector<std::string> failures;  // first few messages only
  std::int64_t failure_count = 0;
  std::int64_t checks = 0;
  double seconds = 0.0;

  void fail(std::string message);
};

// Exploitation probabilities stay inside the upper bound always and inside
// the lower bounds on D_t. States are random loss-gap vectors for which D_t
// holds.
struct SandwichOptions {
  int states = 100;
  std::int64_t samples = 1'000'000;
  double alpha = 3.0;
  std::size_t max_arms = 8;
  std::uint64_t seed = 11;
};
SuiteResult sandwich_suite(const SandwichOptions& options = {});

// Quadrature against Monte Carlo, componentwise within 4 standard errors,
// and quadrature normalization within 1e-6.
struct CrossOracleOptions {
  int states = 100;
  std::int64_t samples = 1'000'000;
  std::size_t max_arms = 8;
  std::vector<double> alphas = {1.5, 2.0, 3.0};
  std::uint64_t seed = 12;
};
SuiteResult cross_oracle_suite(const CrossOracleOptions& options = {});

using ExplorationFn = std::function<ExplorationDist(std::span<const double> gap,
                                                    double eta, double alpha)>;

// sum_i q_i <= (2 alpha / (alpha - 1)) K^((alpha - 1) / (2 alpha)), exactly.
// `weights` defaults to the policy's exploration_weights; tests substitute
// a mutated version to confirm the suite notices.
struct SumQOptions {
  int states = 10'000;
  std::vector<std::size_t> arms = {2, 8, 64, 512};
  std::vector<double> alphas = {1.5, 3.0};
  std::uint64_t seed = 13;
  ExplorationFn weights;
};
SuiteResult sum_q_suite(const SumQOptions& options = {});

// Newton solver: |sum w - 1| <= 1e-10, agreement with bisection to 1e-8,
// uniform input gives 1/K to 1e-12.
struct SolverOptions {
  int states = 10'000;
  std::size_t max_arms = 16;
  double beta = 2.0 / 3.0;
  std::uint64_t seed = 14;
};
SuiteResult tsallis_solver_suite(const SolverOptions& options = {});

// sum_j p_j * iw_estimate(l_j, j, p) = l componentwise to 1e-12.
struct UnbiasednessOptions {
  int pairs = 1000;
  std::size_t max_arms = 16;
  std::uint64_t seed = 15;
};
SuiteResult iw_unbiasedness_suite(const UnbiasednessOptions& options = {});

// C_alpha at alpha = 3 and the K = 2 D_t boundary.
SuiteResult constants_suite();

// Along real FTPL runs on the five-arm stochastic instance: whenever D_t
// holds for the true best arm, that arm has zero loss gap.
struct InstrumentedOptions {
  int repetitions = 20;
  std::int64_t horizon = 5000;
  std::uint64_t seed = 16;
};
SuiteResult dt_instrumented_suite(const InstrumentedOptions& options = {});

// On D_t states with alpha = 3: w_i^(2/3) <= q_i <= (2e^2)^(2/3) w_i^(2/3)
// for suboptimal arms (w by Monte Carlo, 4 standard-error margins).
struct CorrespondenceOptions {
  int states = 30;
  std::int64_t samples = 400'000;
  std::size_t max_arms = 8;
  std::uint64_t seed = 17;
};
SuiteResult correspondence_suite(const CorrespondenceOptions& options = {});

struct VerifyOptions {
  // Multiplies state and sample counts; 1.0 is the full acceptance scale.
  double scale = 1.0;
  std::uint64_t seed_offset = 0;
};
std::vector<SuiteResult> run_all(const VerifyOptions& options = {});

void print_report(std::ostream& out, const std::vector<SuiteResult>& results);
void write_report_csv(std::ostream& out, const std::vector<SuiteResult>& results);

}  // namespace decoupled::verify

#endif  // DECOUPLED_VERIFY_H_
