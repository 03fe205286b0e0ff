#include "decoupled/core.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace decoupled {

void check_arm(ArmIndex arm, std::size_t num_arms) {
  if (arm >= num_arms) {
    throw std::out_of_range("arm index " + std::to_string(arm) +
                            " out of range for K=" + std::to_string(num_arms));
  }
}

ArmIndex argmin(std::span<const double> values) {
  ArmIndex best = 0;
  for (ArmIndex i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

ArmIndex argmax(std::span<const double> values) {
  ArmIndex best = 0;
  for (ArmIndex i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// -- CumLossEstimate ----------------------------------------------------------

CumLossEstimate::CumLossEstimate(std::size_t num_arms)
    : total_(num_arms, 0.0), gap_(num_arms, 0.0) {
  if (num_arms == 0) throw std::invalid_argument("need at least one arm");
}

void CumLossEstimate::add(ArmIndex arm, double amount) {
  check_arm(arm, total_.size());
  if (!(amount >= 0.0)) {
    throw std::invalid_argument("cumulative loss increments must be >= 0");
  }
  if (amount == 0.0) return;
  total_[arm] += amount;
  refresh();
}

void CumLossEstimate::refresh() {
  leader_ = argmin(total_);
  min_total_ = total_[leader_];
  for (std::size_t i = 0; i < total_.size(); ++i) {
    gap_[i] = total_[i] - min_total_;
  }
}

// -- IW estimate --------------------------------------------------------------

std::vector<double> SparseEstimate::dense(std::size_t num_arms) const {
  check_arm(arm, num_arms);
  std::vector<double> out(num_arms, 0.0);
  out[arm] = value;
  return out;
}

SparseEstimate iw_estimate(double observed_loss, ArmIndex explore_arm,
                           std::span<const double> probs) {
  check_arm(explore_arm, probs.size());
  const double p = probs[explore_arm];
  if (!(p > 0.0)) {
    throw std::invalid_argument(
        "importance weight undefined: explored arm has zero probability");
  }
  return {explore_arm, observed_loss / p};
}

// -- ExplorationDist ----------------------------------------------------------

void ExplorationDist::normalize() {
  double total = 0.0;
  for (double w : weights) total += w;
  probs.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    probs[i] = weights[i] / total;
  }
}

ArmIndex ExplorationDist::sample(double u) const { return sample_from(probs, u); }

ArmIndex sample_from(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  ArmIndex last_positive = 0;
  for (ArmIndex i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

// -- RegretAccumulator --------------------------------------------------------

RegretAccumulator::RegretAccumulator(std::size_t num_arms)
    : cum_arm_means_(num_arms, 0.0) {}

void RegretAccumulator::record_round(const EnvironmentStep& step,
                                     const DecoupledAction& action) {
  const std::size_t k = cum_arm_means_.size();
  if (step.means.size() != k) {
    throw std::invalid_argument("environment step has wrong number of arms");
  }
  check_arm(action.exploit, k);
  check_arm(action.explore, k);
  cum_exploit_mean_ += step.means[action.exploit];
  for (std::size_t i = 0; i < k; ++i) cum_arm_means_[i] += step.means[i];
  ++rounds_;
}

ArmIndex RegretAccumulator::best_arm() const { return argmin(cum_arm_means_); }

double RegretAccumulator::pseudo_regret() const {
  return cum_exploit_mean_ - cum_arm_means_[best_arm()];
}

}  // namespace decoupled
