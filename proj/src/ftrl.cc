#include "decoupled/ftrl.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace decoupled {
namespace {

constexpr int kMaxIterations = 200;
constexpr double kResidualTolerance = 1e-10;

// x^(-power), with the common beta = 2/3 case (power 3) done by multiplication.
inline double inverse_power(double x, double power) {
  if (power == 3.0) return 1.0 / (x * x * x);
  return std::pow(x, -power);
}

}  // namespace

void FtrlParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must lie in (0, 1)");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("c must be a finite value > 0");
  }
  if (num_arms == 0) throw std::invalid_argument("num_arms must be >= 1");
}

double ftrl_learning_rate(std::int64_t t, const FtrlParams& params) {
  if (t < 1) throw std::invalid_argument("learning rate: t must be >= 1");
  return params.c / std::sqrt(static_cast<double>(t));
}

TsallisSolveInfo solve_weights_into(std::span<const double> gap, double eta,
                                    double beta, std::span<double> out) {
  const std::size_t k = gap.size();
  const double scale = eta * (1.0 - beta);
  const double power = 1.0 / (1.0 - beta);

  // sum_i w_i(nu) - 1 and its derivative -eta * sum_i w_i / x_i.
  auto evaluate = [&](double nu, double& derivative) {
    double sum = 0.0;
    double slope = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = 1.0 + scale * (gap[i] + nu);
      const double w = inverse_power(x, power);
      sum += w;
      slope += w / x;
    }
    derivative = -eta * slope;
    return sum - 1.0;
  };

  // min gap is 0, so sum w(0) >= 1; every w_i(nu) <= (1 + scale nu)^(-power),
  // so sum w <= 1 once K (1 + scale nu)^(-power) <= 1.
  double lo = 0.0;
  double hi = (std::pow(static_cast<double>(k), 1.0 - beta) - 1.0) / scale;

  TsallisSolveInfo info;
  double nu = 0.0;
  double derivative = 0.0;
  double residual = evaluate(nu, derivative);
  bool converged = std::abs(residual) <= kResidualTolerance;
  while (!converged && info.iterations < kMaxIterations) {
    ++info.iterations;
    if (residual > 0.0) {
      lo = nu;
    } else {
      hi = nu;
    }
    double next = nu - residual / derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    nu = next;
    residual = evaluate(nu, derivative);
    converged = std::abs(residual) <= kResidualTolerance;
    if (converged && residual != 0.0) {
      // One more Newton step: quadratic convergence pushes the residual to
      // rounding level so symmetric inputs come out uniform to ~1e-16.
      const double polish = nu - residual / derivative;
      if (polish >= lo && polish <= hi) {
        double polished_derivative = 0.0;
        const double polished = evaluate(polish, polished_derivative);
        if (std::abs(polished) <= std::abs(residual)) {
          nu = polish;
          residual = polished;
        }
      }
    }
  }
  if (!converged) {
    throw SolverError("Tsallis weight solver did not converge after " +
                      std::to_string(kMaxIterations) +
                      " iterations (residual " + std::to_string(residual) + ")");
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = inverse_power(1.0 + scale * (gap[i] + nu), power);
    sum += out[i];
  }
  for (std::size_t i = 0; i < k; ++i) out[i] /= sum;

  info.nu = nu;
  info.residual = std::abs(residual);
  return info;
}

std::vector<double> solve_weights(std::span<const double> gap, double eta,
                                  double beta) {
  std::vector<double> w(gap.size());
  solve_weights_into(gap, eta, beta, w);
  return w;
}

void exploration_from_weights_into(std::span<const double> w, double beta,
                                   ExplorationDist& out) {
  const double exponent = 1.0 - beta / 2.0;
  out.weights.resize(w.size());
  out.ranks.clear();
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.weights[i] = std::pow(w[i], exponent);
  }
  out.normalize();
}

ExplorationDist exploration_from_weights(std::span<const double> w, double beta) {
  ExplorationDist dist;
  exploration_from_weights_into(w, beta, dist);
  return dist;
}

// -- FtrlPolicy ---------------------------------------------------------------

FtrlPolicy::FtrlPolicy(const FtrlParams& params)
    : params_((params.validate(), params)),
      estimate_(params.num_arms),
      weights_(params.num_arms, 1.0 / static_cast<double>(params.num_arms)) {}

std::span<const double> FtrlPolicy::compute_weights() {
  last_solve_ = solve_weights_into(estimate_.gap(), current_learning_rate(),
                                   params_.beta, weights_);
  return weights_;
}

ArmIndex FtrlPolicy::sample_exploit(Rng& rng) {
  compute_weights();
  return sample_from(weights_, rng.uniform());
}

DecoupledAction FtrlPolicy::act(Rng& rng) {
  DecoupledAction action;
  action.exploit = sample_exploit(rng);
  exploration_from_weights_into(weights_, params_.beta, dist_);
  action.explore = dist_.sample(rng.uniform());
  return action;
}

void FtrlPolicy::absorb(ArmIndex arm, double loss, double prob) {
  const SparseEstimate est =
      iw_estimate(loss, 0, std::span<const double>(&prob, 1));
  check_arm(arm, params_.num_arms);
  estimate_.add(arm, est.value);
  ++round_;
}

void FtrlPolicy::update(const DecoupledAction& action, double observed,
                        const ExplorationDist& dist) {
  const SparseEstimate est = iw_estimate(observed, action.explore, dist.probs);
  estimate_.add(est.arm, est.value);
  ++round_;
}

void FtrlPolicy::observe(const DecoupledAction& action, double explored_loss) {
  update(action, explored_loss, dist_);
}

}  // namespace decoupled
