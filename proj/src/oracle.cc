#include "decoupled/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace decoupled::oracle {
namespace {

constexpr double kQuadTolerance = 1e-8;
constexpr double kHeadCutoff = 1e-12;  // in u = 1/z
constexpr int kMinDepth = 4;
constexpr int kMaxDepth = 50;

double pareto_draw(double alpha, double u) {
  return std::pow(1.0 - u, -1.0 / alpha);
}

// Integrand for arm i in s, where z = 1 / s^2:
//   2 alpha s^(2 alpha - 1) / (1 + a_i s^2)^(alpha + 1)
//     * prod_{j != i} (1 - (s^2 / (1 + a_j s^2))^alpha)
// with a = eta * gap.
struct ArmIntegrand {
  std::span<const double> scaled_gap;
  std::size_t arm;
  double alpha;

  double operator()(double s) const {
    if (s <= 0.0) return 0.0;
    const double u = s * s;
    const double ai = scaled_gap[arm];
    double value = 2.0 * alpha * std::pow(s, 2.0 * alpha - 1.0) /
                   std::pow(1.0 + ai * u, alpha + 1.0);
    for (std::size_t j = 0; j < scaled_gap.size(); ++j) {
      if (j == arm) continue;
      value *= 1.0 - std::pow(u / (1.0 + scaled_gap[j] * u), alpha);
    }
    return value;
  }
};

struct Simpson {
  const ArmIntegrand& f;
  bool failed = false;

  double recurse(double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth >= kMinDepth && std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    if (depth >= kMaxDepth) {
      failed = true;
      return left + right;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  double integrate(double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, b, fa, fm, fb, whole, tol, 0);
  }
};

}  // namespace

ProbEstimate estimate_w_montecarlo(std::span<const double> gap, double eta,
                                   double alpha, std::int64_t samples, Rng& rng) {
  if (samples < 10000) {
    throw std::invalid_argument("Monte Carlo estimate needs at least 10^4 samples");
  }
  const std::size_t k = gap.size();
  std::vector<std::int64_t> wins(k, 0);
  for (std::int64_t n = 0; n < samples; ++n) {
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double value = gap[i] - pareto_draw(alpha, rng.uniform()) / eta;
      if (i == 0 || value < best_value) {
        best_value = value;
        best = i;
      }
    }
    ++wins[best];
  }
  ProbEstimate out;
  out.samples = samples;
  out.probs.resize(k);
  out.std_errors.resize(k);
  const double total = static_cast<double>(samples);
  for (std::size_t i = 0; i < k; ++i) {
    const double p = static_cast<double>(wins[i]) / total;
    out.probs[i] = p;
    out.std_errors[i] = std::sqrt(p * (1.0 - p) / total);
  }
  return out;
}

std::vector<double> integrate_w(std::span<const double> gap, double eta,
                                double alpha) {
  const std::size_t k = gap.size();
  if (k == 0 || k > 64) {
    throw std::invalid_argument("integrate_w supports 1 <= K <= 64");
  }
  if (k == 1) return {1.0};
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < k; ++i) scaled[i] = eta * gap[i];

  // The dropped head u in (0, 1e-12] contributes at most (1e-12)^alpha.
  const double s_lo = std::sqrt(kHeadCutoff);
  std::vector<double> w(k);
  for (std::size_t i = 0; i < k; ++i) {
    const ArmIntegrand integrand{scaled, i, alpha};
    Simpson simpson{integrand};
    w[i] = simpson.integrate(s_lo, 1.0, kQuadTolerance);
    if (simpson.failed) {
      throw QuadratureError("adaptive Simpson did not reach 1e-8 for arm " +
                            std::to_string(i));
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (std::abs(total - 1.0) > 1e-6) {
    throw QuadratureError("quadrature components sum to " +
                          std::to_string(total) + ", not 1");
  }
  return w;
}

double dt_sum(std::span<const double> gap, double eta, double alpha,
              ArmIndex best) {
  check_arm(best, gap.size());
  const double inv_root_two = std::pow(2.0, -1.0 / alpha);
  double sum = 0.0;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    if (i == best) continue;
    sum += 0.5 * std::pow(1.0 + eta * gap[i] * inv_root_two, -alpha);
  }
  return sum;
}

bool event_dt(std::span<const double> gap, double eta, double alpha,
              ArmIndex best) {
  return dt_sum(gap, eta, alpha, best) <= 0.5;
}

double c_alpha(double alpha) {
  const double a2 = alpha * alpha;
  return (2.0 * a2 * alpha + (std::numbers::e - 2.0) * a2) /
         ((alpha - 1.0) * (2.0 * alpha - 1.0));
}

double sum_q_bound(double alpha, std::size_t num_arms) {
  return 2.0 * alpha / (alpha - 1.0) *
         std::pow(static_cast<double>(num_arms), (alpha - 1.0) / (2.0 * alpha));
}

BoundReport bound_report(std::span<const double> gap, double eta, double alpha,
                         ArmIndex best) {
  const double e2 = std::numbers::e * std::numbers::e;
  BoundReport r;
  r.upper.resize(gap.size());
  r.lower.resize(gap.size());
  for (std::size_t i = 0; i < gap.size(); ++i) {
    r.upper[i] = std::pow(1.0 + eta * gap[i], -alpha);
    r.lower[i] = r.upper[i] / (2.0 * e2);
  }
  r.dt_holds = event_dt(gap, eta, alpha, best);
  r.c_alpha = c_alpha(alpha);
  r.best_lower = 1.0 / (2.0 * std::numbers::e);
  return r;
}

std::string BoundCheck::describe_failures() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    if (c.passed) continue;
    os << c.name << " bound violated at arm " << c.arm << ": estimate "
       << c.estimate << " vs bound " << c.bound << " (slack " << c.slack
       << ")\n";
  }
  return os.str();
}

BoundCheck check_bounds(std::span<const double> gap, double eta, double alpha,
                        std::int64_t samples, Rng& rng) {
  BoundCheck out;
  ArmIndex best = 0;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    if (gap[i] == 0.0) {
      best = i;
      break;
    }
  }
  out.report = bound_report(gap, eta, alpha, best);
  out.estimate = estimate_w_montecarlo(gap, eta, alpha, samples, rng);

  double max_slack = 0.0;
  double min_distance = std::numeric_limits<double>::infinity();
  auto add = [&](std::string name, ArmIndex arm, double bound, bool is_upper) {
    InequalityCheck c;
    c.name = std::move(name);
    c.arm = arm;
    c.estimate = out.estimate.probs[arm];
    c.bound = bound;
    c.slack = 4.0 * out.estimate.std_errors[arm];
    c.passed = is_upper ? c.estimate <= bound + c.slack
                        : c.estimate >= bound - c.slack;
    max_slack = std::max(max_slack, c.slack);
    min_distance = std::min(min_distance, std::abs(c.estimate - bound));
    out.passed = out.passed && c.passed;
    out.checks.push_back(std::move(c));
  };

  for (std::size_t i = 0; i < gap.size(); ++i) {
    add("upper", i, out.report.upper[i], true);
  }
  if (out.report.dt_holds) {
    for (std::size_t i = 0; i < gap.size(); ++i) {
      if (i == best) continue;
      add("lower", i, out.report.lower[i], false);
    }
    add("best_lower", best, out.report.best_lower, false);
  }
  out.resolution_ok = max_slack < 0.5 * min_distance;
  return out;
}

std::vector<double> bisect_tsallis_weights(std::span<const double> gap,
                                           double eta, double beta) {
  const std::size_t k = gap.size();
  auto weights_at = [&](double nu, std::vector<double>& w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = std::pow(1.0 + eta * (1.0 - beta) * (gap[i] + nu),
                      -1.0 / (1.0 - beta));
      sum += w[i];
    }
    return sum;
  };
  std::vector<double> w(k);
  double lo = 0.0;
  double hi = 1.0;
  while (weights_at(hi, w) > 1.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int iter = 0; iter < 400 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (weights_at(mid, w) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  weights_at(0.5 * (lo + hi), w);
  return w;
}

}  // namespace decoupled::oracle
