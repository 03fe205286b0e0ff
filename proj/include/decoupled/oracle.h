#ifndef DECOUPLED_ORACLE_H_
#define DECOUPLED_ORACLE_H_

// Independent reference computations for quantities the policies never
// evaluate directly: the FTPL exploitation probabilities w (by Monte Carlo
// and by quadrature), the separation event D_t, bound constants, and a
// plain bisection solver for the Tsallis-INF weights.
//
// Nothing here calls into the policy implementations; tests compare the two.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "decoupled/core.h"
#include "decoupled/rng.h"

namespace decoupled::oracle {

struct ProbEstimate {
  std::vector<double> probs;
  std::vector<double> std_errors;  // sqrt(p (1 - p) / samples)
  std::int64_t samples = 0;
};

// Empirical argmin frequencies of gap_i - r_i / eta over `samples` i.i.d.
// Pareto(alpha) perturbation vectors. Requires samples >= 10^4.
ProbEstimate estimate_w_montecarlo(std::span<const double> gap, double eta,
                                   double alpha, std::int64_t samples, Rng& rng);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// w_i = int_1^inf f(z + eta gap_i) prod_{j != i} F(z + eta gap_j) dz with
// the Pareto pdf f and cdf F, evaluated by adaptive Simpson after mapping
// z = 1 / s^2 onto s in (sqrt(1e-12), 1]. Absolute tolerance 1e-8 per
// component. Throws QuadratureError if the tolerance is not reached or the
// components fail to sum to 1 within 1e-6. Requires K <= 64.
std::vector<double> integrate_w(std::span<const double> gap, double eta,
                                double alpha);

// sum_{i != best} (2^(1/alpha) + eta gap_i)^(-alpha), computed as
// 0.5 (1 + eta gap_i 2^(-1/alpha))^(-alpha) so a zero gap contributes
// exactly 1/2.
double dt_sum(std::span<const double> gap, double eta, double alpha,
              ArmIndex best);
// D_t: dt_sum(...) <= 1/2.
bool event_dt(std::span<const double> gap, double eta, double alpha,
              ArmIndex best);

// (2 alpha^3 + (e - 2) alpha^2) / ((alpha - 1)(2 alpha - 1)).
double c_alpha(double alpha);

// (2 alpha / (alpha - 1)) K^((alpha - 1) / (2 alpha)): ceiling on sum_i q_i.
double sum_q_bound(double alpha, std::size_t num_arms);

// Bounds on the exploitation probabilities: upper_i = (1 + eta gap_i)^-alpha
// always; on D_t, lower_i = upper_i / (2 e^2) for i != best and w_best >= 1/(2e).
struct BoundReport {
  std::vector<double> upper;
  std::vector<double> lower;
  bool dt_holds = false;
  double c_alpha = 0.0;
  double best_lower = 0.0;  // 1 / (2e)
};

BoundReport bound_report(std::span<const double> gap, double eta, double alpha,
                         ArmIndex best);

struct InequalityCheck {
  std::string name;  // "upper", "lower" or "best_lower"
  ArmIndex arm = 0;
  double estimate = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // 4 * stderr
  bool passed = false;
};

struct BoundCheck {
  BoundReport report;
  ProbEstimate estimate;
  std::vector<InequalityCheck> checks;
  bool passed = true;
  // 4 * max stderr below half the smallest distance between an estimate
  // and a bound it is tested against; informational.
  bool resolution_ok = true;

  std::string describe_failures() const;
};

// Estimates w by Monte Carlo and tests every applicable inequality with a
// 4-standard-error margin. `best` defaults to the lowest-index zero gap.
BoundCheck check_bounds(std::span<const double> gap, double eta, double alpha,
                        std::int64_t samples, Rng& rng);

// Tsallis-INF stationarity weights by bisection on the multiplier nu to a
// bracket width of 1e-12 (bracket found by doubling). Reference for the
// Newton solver.
std::vector<double> bisect_tsallis_weights(std::span<const double> gap,
                                           double eta, double beta);

}  // namespace decoupled::oracle

#endif  // DECOUPLED_ORACLE_H_
