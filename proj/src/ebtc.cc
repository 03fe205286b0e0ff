#include "decoupled/ebtc.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace decoupled {

EbTcSampler::EbTcSampler(std::size_t num_arms)
    : counts_(num_arms, 0), sums_(num_arms, 0.0), mean_losses_(num_arms, 0.0) {
  if (num_arms == 0) throw std::invalid_argument("need at least one arm");
}

ArmIndex EbTcSampler::challenger() const {
  const std::size_t k = counts_.size();
  if (k < 2) throw std::logic_error("challenger needs at least two arms");
  if (!initialized()) throw std::logic_error("challenger before initialization");
  const ArmIndex best = leader();
  const double inv_best = 1.0 / static_cast<double>(counts_[best]);
  ArmIndex chosen = best == 0 ? 1 : 0;
  double chosen_score = std::numeric_limits<double>::infinity();
  for (ArmIndex j = 0; j < k; ++j) {
    if (j == best) continue;
    const double score =
        (mean_losses_[j] - mean_losses_[best]) /
        std::sqrt(inv_best + 1.0 / static_cast<double>(counts_[j]));
    if (score < chosen_score) {
      chosen_score = score;
      chosen = j;
    }
  }
  return chosen;
}

ExploreDraw EbTcSampler::explore(Rng& rng) const {
  if (!initialized()) return {initialized_arms_, 1.0};
  if (counts_.size() == 1) return {0, 1.0};
  const double u = rng.uniform();
  return {u < 0.5 ? leader() : challenger(), 0.5};
}

void EbTcSampler::observe(ArmIndex arm, double loss) {
  check_arm(arm, counts_.size());
  ++counts_[arm];
  sums_[arm] += loss;
  mean_losses_[arm] = sums_[arm] / static_cast<double>(counts_[arm]);
  while (initialized_arms_ < counts_.size() && counts_[initialized_arms_] > 0) {
    ++initialized_arms_;
  }
}

void EbTcSampler::set_state(std::span<const double> mean_losses,
                            std::span<const std::int64_t> counts) {
  if (mean_losses.size() != counts_.size() || counts.size() != counts_.size()) {
    throw std::invalid_argument("EB-TC state has wrong number of arms");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts[i] < 1) throw std::invalid_argument("EB-TC counts must be >= 1");
    counts_[i] = counts[i];
    mean_losses_[i] = mean_losses[i];
    sums_[i] = mean_losses[i] * static_cast<double>(counts[i]);
  }
  initialized_arms_ = counts_.size();
}

DecoupledAction EbTcPolicy::act(Rng& rng) {
  DecoupledAction action;
  action.exploit = sampler_.recommend();
  action.explore = sampler_.explore(rng).arm;
  return action;
}

void EbTcPolicy::observe(const DecoupledAction& action, double explored_loss) {
  sampler_.observe(action.explore, explored_loss);
}

}  // namespace decoupled
