#include "decoupled/ftpl.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace decoupled {

void FtplParams::validate() const {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be a finite value > 1");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("c must be a finite value > 0");
  }
  if (num_arms == 0) throw std::invalid_argument("num_arms must be >= 1");
}

double learning_rate(std::int64_t t, const FtplParams& params) {
  if (t < 1) throw std::invalid_argument("learning_rate: t must be >= 1");
  const double k = static_cast<double>(params.num_arms);
  return params.c * std::pow(k, 1.0 / params.alpha - 0.5) /
         std::sqrt(static_cast<double>(t));
}

double pareto_sample(double alpha, double uniform) {
  if (alpha == 3.0) return 1.0 / std::cbrt(1.0 - uniform);
  return std::pow(1.0 - uniform, -1.0 / alpha);
}

ArmIndex select_exploit(std::span<const double> losses,
                        std::span<const double> perturbations, double eta) {
  ArmIndex best = 0;
  double best_value = losses[0] - perturbations[0] / eta;
  for (ArmIndex i = 1; i < losses.size(); ++i) {
    const double value = losses[i] - perturbations[i] / eta;
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

ExplorationDist exploration_weights(std::span<const double> gap, double eta,
                                    double alpha) {
  FtplExplorer explorer(gap.size(), alpha);
  ExplorationDist dist;
  explorer.compute(gap, eta, dist);
  return dist;
}

// -- FtplExplorer -------------------------------------------------------------

FtplExplorer::FtplExplorer(std::size_t num_arms, double alpha)
    : alpha_(alpha),
      exponent_((alpha + 1.0) / 2.0),
      rank_term_(num_arms),
      order_(num_arms) {
  for (std::size_t r = 0; r < num_arms; ++r) {
    rank_term_[r] = std::pow(static_cast<double>(r + 1), -1.0 / alpha_);
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void FtplExplorer::compute(std::span<const double> gap, double eta,
                           ExplorationDist& out) {
  const std::size_t k = gap.size();
  out.weights.resize(k);
  out.ranks.resize(k);
  // Order by (gap, index) so ties rank the lowest index first. Between policy
  // rounds only one arm's estimate moves, so the previous order is almost
  // sorted and an insertion pass costs O(K); fall back to a full sort when
  // the input is far from the cached order.
  const auto before = [&gap](std::size_t a, std::size_t b) {
    return gap[a] < gap[b] || (gap[a] == gap[b] && a < b);
  };
  std::size_t moves = 0;
  for (std::size_t i = 1; i < k && moves <= 4 * k; ++i) {
    const std::size_t arm = order_[i];
    std::size_t j = i;
    for (; j > 0 && before(arm, order_[j - 1]); --j) order_[j] = order_[j - 1];
    order_[j] = arm;
    moves += i - j;
  }
  if (moves > 4 * k) std::sort(order_.begin(), order_.end(), before);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t arm = order_[r];
    out.ranks[arm] = r + 1;
    const double gap_term = 1.0 / (1.0 + eta * gap[arm]);
    const double base = std::min(gap_term, rank_term_[r]);
    // exponent_ is 2 for the default alpha = 3.
    out.weights[arm] = exponent_ == 2.0 ? base * base : std::pow(base, exponent_);
  }
  out.normalize();
}

// -- FtplPolicy ---------------------------------------------------------------

FtplPolicy::FtplPolicy(const FtplParams& params)
    : params_((params.validate(), params)),
      estimate_(params.num_arms),
      explorer_(params.num_arms, params.alpha),
      uniforms_(params.num_arms, 0.0) {
  for (int a = 2; a <= 8; ++a) {
    if (params_.alpha == a) integer_alpha_ = a;
  }
}

// Same result as select_exploit on the materialized perturbations. Arm i can
// only take the lead if r_i > x = eta * (gap_i - best_value), i.e. when
// 1 - u_i < x^(-alpha). The screen is loosened by a relative 1e-9 and every
// candidate is confirmed with the exact value, so rounding never flips a
// decision; the Pareto value is only computed for the few candidates.
ArmIndex FtplPolicy::sample_exploit(Rng& rng) {
  const double eta = current_learning_rate();
  const std::span<const double> gap = estimate_.gap();
  const double alpha = params_.alpha;
  for (double& u : uniforms_) u = rng.uniform();

  ArmIndex best = 0;
  double best_value = gap[0] - pareto_sample(alpha, uniforms_[0]) / eta;
  for (ArmIndex i = 1; i < uniforms_.size(); ++i) {
    const double x = eta * (gap[i] - best_value);
    if (x > 1.0) {
      double bound;
      if (integer_alpha_ != 0) {
        double power = x;
        for (int a = 1; a < integer_alpha_; ++a) power *= x;
        bound = 1.0 / power;
      } else {
        bound = std::pow(x, -alpha);
      }
      if (1.0 - uniforms_[i] >= bound * (1.0 + 1e-9)) continue;
    }
    const double value = gap[i] - pareto_sample(alpha, uniforms_[i]) / eta;
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

std::vector<double> FtplPolicy::last_perturbations() const {
  std::vector<double> out(uniforms_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = pareto_sample(params_.alpha, uniforms_[i]);
  }
  return out;
}

const ExplorationDist& FtplPolicy::compute_exploration() {
  explorer_.compute(estimate_.gap(), current_learning_rate(), dist_);
  return dist_;
}

DecoupledAction FtplPolicy::act(Rng& rng) {
  DecoupledAction action;
  action.exploit = sample_exploit(rng);
  compute_exploration();
  action.explore = dist_.sample(rng.uniform());
  return action;
}

void FtplPolicy::absorb(ArmIndex arm, double loss, double prob) {
  const SparseEstimate est =
      iw_estimate(loss, 0, std::span<const double>(&prob, 1));
  check_arm(arm, params_.num_arms);
  estimate_.add(arm, est.value);
  ++round_;
}

void FtplPolicy::update(const DecoupledAction& action, double observed,
                        const ExplorationDist& dist) {
  const SparseEstimate est = iw_estimate(observed, action.explore, dist.probs);
  estimate_.add(est.arm, est.value);
  ++round_;
}

void FtplPolicy::observe(const DecoupledAction& action, double explored_loss) {
  update(action, explored_loss, dist_);
}

}  // namespace decoupled
