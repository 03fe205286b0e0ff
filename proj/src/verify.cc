#include "decoupled/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "decoupled/environment.h"
#include "decoupled/ftpl.h"
#include "decoupled/ftrl.h"
#include "decoupled/oracle.h"
#include "decoupled/rng.h"

namespace decoupled::verify {
namespace {

constexpr std::size_t kMaxRecordedFailures = 8;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

std::size_t uniform_arms(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
}

// Scaled gaps x_i = eta * gap_i with a zero at `best`, resampled until D_t
// holds. Returns the raw gap vector for the drawn eta.
struct DtState {
  std::vector<double> gap;
  double eta = 1.0;
  ArmIndex best = 0;
};

DtState draw_dt_state(Rng& rng, std::size_t max_arms, double alpha) {
  DtState s;
  const std::size_t k = uniform_arms(rng, 2, max_arms);
  s.best = static_cast<ArmIndex>(rng.uniform() * static_cast<double>(k));
  s.eta = std::exp(uniform_in(rng, std::log(0.01), std::log(2.0)));
  s.gap.assign(k, 0.0);
  do {
    for (std::size_t i = 0; i < k; ++i) {
      s.gap[i] = i == s.best ? 0.0 : uniform_in(rng, 0.0, 8.0) / s.eta;
    }
  } while (!oracle::event_dt(s.gap, s.eta, alpha, s.best));
  return s;
}

std::string format_vector(std::span<const double> v) {
  std::ostringstream os;
  os << std::setprecision(6) << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace

void SuiteResult::fail(std::string message) {
  passed = false;
  ++failure_count;
  if (failures.size() < kMaxRecordedFailures) failures.push_back(std::move(message));
}

SuiteResult sandwich_suite(const SandwichOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "exploitation-probability sandwich";
  Rng rng(options.seed);
  int unresolved = 0;
  for (int n = 0; n < options.states; ++n) {
    const DtState s = draw_dt_state(rng, options.max_arms, options.alpha);
    const auto check = oracle::check_bounds(s.gap, s.eta, options.alpha,
                                            options.samples, rng);
    result.checks += static_cast<std::int64_t>(check.checks.size());
    if (!check.report.dt_holds) {
      result.fail("state " + std::to_string(n) + ": generator produced a non-D_t state");
    }
    if (!check.resolution_ok) ++unresolved;
    if (!check.passed) {
      result.fail("state " + std::to_string(n) + " eta*gap=" +
                  format_vector([&] {
                    std::vector<double> x(s.gap);
                    for (double& v : x) v *= s.eta;
                    return x;
                  }()) +
                  ": " + check.describe_failures());
    }
  }
  result.summary = std::to_string(options.states) + " D_t states, " +
                   std::to_string(result.checks) + " inequalities at " +
                   std::to_string(options.samples) + " samples (" +
                   std::to_string(unresolved) + " states with margin finer than 4 SE)";
  result.seconds = timer.seconds();
  return result;
}

SuiteResult cross_oracle_suite(const CrossOracleOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "quadrature vs Monte Carlo";
  Rng rng(options.seed);
  double worst_z = 0.0;
  double worst_norm = 0.0;
  for (int n = 0; n < options.states; ++n) {
    const double alpha = options.alphas[static_cast<std::size_t>(n) % options.alphas.size()];
    const std::size_t k = uniform_arms(rng, 2, options.max_arms);
    const double eta = std::exp(uniform_in(rng, std::log(0.05), std::log(5.0)));
    const auto best = static_cast<ArmIndex>(rng.uniform() * static_cast<double>(k));
    std::vector<double> gap(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (i != best) gap[i] = uniform_in(rng, 0.0, 3.0) / eta;
    }
    std::vector<double> quad;
    try {
      quad = oracle::integrate_w(gap, eta, alpha);
    } catch (const std::exception& e) {
      result.fail("state " + std::to_string(n) + ": " + e.what());
      continue;
    }
    double total = 0.0;
    for (double v : quad) total += v;
    worst_norm = std::max(worst_norm, std::abs(total - 1.0));
    ++result.checks;
    if (std::abs(total - 1.0) > 1e-6) {
      result.fail("state " + std::to_string(n) + ": quadrature sums to " +
                  std::to_string(total));
    }
    const auto mc = oracle::estimate_w_montecarlo(gap, eta, alpha, options.samples, rng);
    for (std::size_t i = 0; i < k; ++i) {
      ++result.checks;
      const double diff = std::abs(mc.probs[i] - quad[i]);
      const double se = mc.std_errors[i];
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
      if (diff > 4.0 * se) {
        std::ostringstream os;
        os << "state " << n << " alpha=" << alpha << " arm " << i << ": quadrature "
           << quad[i] << " vs Monte Carlo " << mc.probs[i] << " (4 SE = " << 4 * se
           << ")";
        result.fail(os.str());
      }
    }
  }
  std::ostringstream os;
  os << options.states << " states, max |z| = " << std::setprecision(3) << worst_z
     << ", max |sum - 1| = " << worst_norm;
  result.summary = os.str();
  result.seconds = timer.seconds();
  return result;
}

SuiteResult sum_q_suite(const SumQOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "exploration weight sum bound";
  const ExplorationFn weights =
      options.weights ? options.weights : ExplorationFn(&exploration_weights);
  Rng rng(options.seed);
  double worst_ratio = 0.0;
  for (int n = 0; n < options.states; ++n) {
    const std::size_t k = options.arms[static_cast<std::size_t>(n) % options.arms.size()];
    const double alpha =
        options.alphas[static_cast<std::size_t>(n / static_cast<int>(options.arms.size())) %
                       options.alphas.size()];
    const double eta = std::exp(uniform_in(rng, std::log(1e-3), std::log(10.0)));
    std::vector<double> gap(k, 0.0);
    switch (n % 4) {
      case 0:  // all tied
        break;
      case 1: {  // spread gaps with one leader
        const auto best = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
        for (std::size_t i = 0; i < k; ++i) {
          if (i != best) gap[i] = uniform_in(rng, 0.0, 20.0) / eta;
        }
        break;
      }
      case 2: {  // a tied block at zero, the rest small
        for (std::size_t i = 0; i < k; ++i) {
          gap[i] = rng.uniform() < 0.5 ? 0.0 : uniform_in(rng, 0.0, 0.5) / eta;
        }
        gap[0] = 0.0;
        break;
      }
      default: {  // integer-valued gaps with many ties
        for (std::size_t i = 1; i < k; ++i) {
          gap[i] = std::floor(uniform_in(rng, 0.0, 4.0));
        }
        break;
      }
    }
    const ExplorationDist dist = weights(gap, eta, alpha);
    double total = 0.0;
    for (double q : dist.weights) total += q;
    const double bound = oracle::sum_q_bound(alpha, k);
    worst_ratio = std::max(worst_ratio, total / bound);
    ++result.checks;
    if (!(total <= bound)) {
      std::ostringstream os;
      os << "state " << n << " K=" << k << " alpha=" << alpha << ": sum q = " << total
         << " exceeds " << bound;
      result.fail(os.str());
    }
  }
  std::ostringstream os;
  os << options.states << " states, max sum(q)/bound = " << std::setprecision(6)
     << worst_ratio;
  result.summary = os.str();
  result.seconds = timer.seconds();
  return result;
}

SuiteResult tsallis_solver_suite(const SolverOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "Tsallis Newton solver";
  Rng rng(options.seed);
  double worst_residual = 0.0;
  double worst_diff = 0.0;
  int max_iterations = 0;
  std::vector<double> w;
  for (int n = 0; n < options.states; ++n) {
    const std::size_t k = uniform_arms(rng, 2, options.max_arms);
    const double eta = std::exp(uniform_in(rng, std::log(0.01), std::log(2.0)));
    const auto best = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
    const double scale = std::exp(uniform_in(rng, std::log(0.1), std::log(500.0)));
    std::vector<double> gap(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (i != best) gap[i] = rng.uniform() < 0.1 ? 0.0 : scale * rng.uniform();
    }
    w.resize(k);
    TsallisSolveInfo info;
    try {
      info = solve_weights_into(gap, eta, options.beta, w);
    } catch (const std::exception& e) {
      result.fail("state " + std::to_string(n) + ": " + e.what());
      continue;
    }
    max_iterations = std::max(max_iterations, info.iterations);
    double total = 0.0;
    bool positive = true;
    for (double v : w) {
      total += v;
      positive = positive && v > 0.0;
    }
    const double residual = std::max(std::abs(total - 1.0), info.residual);
    worst_residual = std::max(worst_residual, residual);
    result.checks += 2;
    if (residual > 1e-10 || !positive) {
      result.fail("state " + std::to_string(n) + ": residual " +
                  std::to_string(residual) + (positive ? "" : " with a nonpositive weight"));
    }
    const auto reference = oracle::bisect_tsallis_weights(gap, eta, options.beta);
    for (std::size_t i = 0; i < k; ++i) {
      const double diff = std::abs(w[i] - reference[i]);
      worst_diff = std::max(worst_diff, diff);
      if (diff > 1e-8) {
        std::ostringstream os;
        os << "state " << n << " arm " << i << ": Newton " << w[i] << " vs bisection "
           << reference[i];
        result.fail(os.str());
      }
    }
  }
  for (std::size_t k = 1; k <= options.max_arms; ++k) {
    const std::vector<double> zeros(k, 0.0);
    const auto uniform = solve_weights(zeros, 1.0, options.beta);
    ++result.checks;
    for (double v : uniform) {
      if (std::abs(v - 1.0 / static_cast<double>(k)) > 1e-12) {
        result.fail("uniform input K=" + std::to_string(k) + " gave " + std::to_string(v));
        break;
      }
    }
  }
  std::ostringstream os;
  os << options.states << " states, max residual " << std::setprecision(3)
     << worst_residual << ", max |Newton - bisection| " << worst_diff
     << ", max iterations " << max_iterations;
  result.summary = os.str();
  result.seconds = timer.seconds();
  return result;
}

SuiteResult iw_unbiasedness_suite(const UnbiasednessOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "importance-weight unbiasedness";
  Rng rng(options.seed);
  double worst = 0.0;
  for (int n = 0; n < options.pairs; ++n) {
    const std::size_t k = uniform_arms(rng, 2, options.max_arms);
    std::vector<double> loss(k), probs(k);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      loss[i] = rng.uniform();
      probs[i] = 1e-3 + rng.uniform();
      total += probs[i];
    }
    for (double& p : probs) p /= total;
    std::vector<double> expectation(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const auto estimate = iw_estimate(loss[j], j, probs).dense(k);
      for (std::size_t i = 0; i < k; ++i) expectation[i] += probs[j] * estimate[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
      ++result.checks;
      const double diff = std::abs(expectation[i] - loss[i]);
      worst = std::max(worst, diff);
      if (diff > 1e-12) {
        result.fail("pair " + std::to_string(n) + " arm " + std::to_string(i) +
                    ": error " + std::to_string(diff));
      }
    }
  }
  std::ostringstream os;
  os << options.pairs << " (loss, p) pairs, max error " << std::setprecision(3) << worst;
  result.summary = os.str();
  result.seconds = timer.seconds();
  return result;
}

SuiteResult constants_suite() {
  Timer timer;
  SuiteResult result;
  result.name = "constants";
  const double e = std::numbers::e;
  const double expected = (2.0 * 27.0 + (e - 2.0) * 9.0) / (2.0 * 5.0);
  const double coded = oracle::c_alpha(3.0);
  ++result.checks;
  if (std::abs(coded - expected) > 1e-12) {
    result.fail("C_alpha(3) = " + std::to_string(coded) + ", expected " +
                std::to_string(expected));
  }
  const std::vector<double> two_tied = {0.0, 0.0};
  const double boundary = oracle::dt_sum(two_tied, 1.0, 3.0, 0);
  result.checks += 2;
  if (boundary != 0.5) {
    result.fail("D_t sum at the K=2 boundary is " + format_vector(std::vector{boundary}) +
                ", not exactly 1/2");
  }
  if (!oracle::event_dt(two_tied, 1.0, 3.0, 0)) {
    result.fail("D_t boundary case K=2 classified as not holding");
  }
  const std::vector<double> three_tied = {0.0, 0.0, 0.0};
  ++result.checks;
  if (oracle::event_dt(three_tied, 1.0, 3.0, 0)) {
    result.fail("D_t holds for K=3 with all gaps zero");
  }
  std::ostringstream os;
  os << std::setprecision(12) << "C_alpha(3) = " << coded << ", D_t(K=2, zero gap) sum = "
     << boundary;
  result.summary = os.str();
  result.seconds = timer.seconds();
  return result;
}

SuiteResult dt_instrumented_suite(const InstrumentedOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "D_t along policy runs";
  const StochasticEnv env({0.4, 0.45, 0.55, 0.7, 0.8});
  constexpr ArmIndex kBest = 0;
  std::int64_t dt_rounds = 0;
  for (int rep = 0; rep < options.repetitions; ++rep) {
    const auto r = static_cast<std::uint64_t>(rep);
    Rng env_rng(derive_seed(options.seed, r, 0));
    Rng policy_rng(derive_seed(options.seed, r, 1));
    FtplPolicy policy(FtplParams{3.0, 2.0, env.num_arms()});
    EnvironmentStep step;
    for (std::int64_t t = 1; t <= options.horizon; ++t) {
      const auto gap = policy.estimate().gap();
      const double eta = policy.current_learning_rate();
      ++result.checks;
      if (oracle::event_dt(gap, eta, 3.0, kBest)) {
        ++dt_rounds;
        if (gap[kBest] != 0.0) {
          result.fail("rep " + std::to_string(rep) + " t=" + std::to_string(t) +
                      ": D_t holds but the best arm has gap " +
                      std::to_string(gap[kBest]));
        }
      }
      env.step(t, env_rng, step);
      const auto action = policy.act(policy_rng);
      policy.observe(action, step.losses[action.explore]);
    }
  }
  std::ostringstream os;
  os << result.checks << " rounds inspected, D_t held in " << dt_rounds;
  result.summary = os.str();
  result.seconds = timer.seconds();
  return result;
}

SuiteResult correspondence_suite(const CorrespondenceOptions& options) {
  Timer timer;
  SuiteResult result;
  result.name = "q vs w^(2/3) correspondence";
  constexpr double kAlpha = 3.0;
  const double exponent = (kAlpha + 1.0) / (2.0 * kAlpha);
  const double factor = std::pow(2.0 * std::numbers::e * std::numbers::e, exponent);
  Rng rng(options.seed);
  for (int n = 0; n < options.states; ++n) {
    const DtState s = draw_dt_state(rng, options.max_arms, kAlpha);
    const auto q = exploration_weights(s.gap, s.eta, kAlpha).weights;
    const auto mc =
        oracle::estimate_w_montecarlo(s.gap, s.eta, kAlpha, options.samples, rng);
    for (std::size_t i = 0; i < s.gap.size(); ++i) {
      if (i == s.best) continue;
      result.checks += 2;
      const double hi_w = mc.probs[i] + 4.0 * mc.std_errors[i];
      const double lo_w = std::max(0.0, mc.probs[i] - 4.0 * mc.std_errors[i]);
      if (q[i] > factor * std::pow(hi_w, exponent)) {
        result.fail("state " + std::to_string(n) + " arm " + std::to_string(i) +
                    ": q above (2e^2)^(2/3) w^(2/3)");
      }
      if (q[i] < std::pow(lo_w, exponent)) {
        result.fail("state " + std::to_string(n) + " arm " + std::to_string(i) +
                    ": q below w^(2/3)");
      }
    }
  }
  result.summary = std::to_string(options.states) + " D_t states, " +
                   std::to_string(result.checks) + " ratio checks";
  result.seconds = timer.seconds();
  return result;
}

std::vector<SuiteResult> run_all(const VerifyOptions& options) {
  auto count = [&](int n) { return std::max(1, static_cast<int>(std::lround(n * options.scale))); };
  auto samples = [&](std::int64_t n) {
    return std::max<std::int64_t>(10'000, std::llround(static_cast<double>(n) * options.scale));
  };
  const std::uint64_t off = options.seed_offset;

  std::vector<SuiteResult> results;
  SandwichOptions sandwich;
  sandwich.states = count(sandwich.states);
  sandwich.samples = samples(sandwich.samples);
  sandwich.seed += off;
  results.push_back(sandwich_suite(sandwich));

  CrossOracleOptions cross;
  cross.states = count(cross.states);
  cross.samples = samples(cross.samples);
  cross.seed += off;
  results.push_back(cross_oracle_suite(cross));

  SumQOptions sum_q;
  sum_q.states = count(sum_q.states);
  sum_q.seed += off;
  results.push_back(sum_q_suite(sum_q));

  SolverOptions solver;
  solver.states = count(solver.states);
  solver.seed += off;
  results.push_back(tsallis_solver_suite(solver));

  UnbiasednessOptions iw;
  iw.pairs = count(iw.pairs);
  iw.seed += off;
  results.push_back(iw_unbiasedness_suite(iw));

  results.push_back(constants_suite());

  InstrumentedOptions instrumented;
  instrumented.repetitions = count(instrumented.repetitions);
  instrumented.seed += off;
  results.push_back(dt_instrumented_suite(instrumented));

  CorrespondenceOptions correspondence;
  correspondence.states = count(correspondence.states);
  correspondence.samples = samples(correspondence.samples);
  correspondence.seed += off;
  results.push_back(correspondence_suite(correspondence));
  return results;
}

void print_report(std::ostream& out, const std::vector<SuiteResult>& results) {
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " -- " << r.summary << " ["
        << std::fixed << std::setprecision(2) << r.seconds << "s]\n"
        << std::defaultfloat;
    for (const auto& f : r.failures) out << "    " << f << '\n';
    if (!r.passed) ++failed;
  }
  out << (failed == 0 ? "all suites passed" : std::to_string(failed) + " suite(s) failed")
      << '\n';
}

void write_report_csv(std::ostream& out, const std::vector<SuiteResult>& results) {
  out << "suite,passed,checks,failures,seconds\n";
  for (const auto& r : results) {
    out << '"' << r.name << "\"," << (r.passed ? 1 : 0) << ',' << r.checks << ','
        << r.failure_count << ',' << r.seconds << '\n';
  }
}

}  // namespace decoupled::verify
