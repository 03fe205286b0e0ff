#ifndef DECOUPLED_EBTC_H_
#define DECOUPLED_EBTC_H_

// Empirical-Best / Top-two-Challenger (EB-TC) exploration and the mixed
// policies that pair it with an FTPL or FTRL exploitation rule.
//
// Variant: fixed-design leader/challenger mixture with weight 1/2 and a
// Gaussian transportation-cost challenger,
//   C = argmin_{j != B} (mean_j - mean_B) / sqrt(1/N_B + 1/N_j),
// where B is the empirical best (lowest mean loss). Each arm is explored
// once, in index order, before the mixture starts.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decoupled/core.h"
#include "decoupled/ftpl.h"
#include "decoupled/ftrl.h"
#include "decoupled/rng.h"

namespace decoupled {

// An explore draw together with the probability the sampler gave that arm.
struct ExploreDraw {
  ArmIndex arm = 0;
  double prob = 1.0;
};

class EbTcSampler {
 public:
  explicit EbTcSampler(std::size_t num_arms);

  std::size_t num_arms() const { return counts_.size(); }
  bool initialized() const { return initialized_arms_ == counts_.size(); }

  // Forced round-robin until every arm has one sample (probability 1), then
  // the leader with probability 1/2 and the challenger otherwise.
  ExploreDraw explore(Rng& rng) const;
  void observe(ArmIndex arm, double loss);

  ArmIndex leader() const { return argmin(mean_losses_); }
  // Requires K >= 2 and every count >= 1.
  ArmIndex challenger() const;
  // Empirical best; exact ties to the lowest index.
  ArmIndex recommend() const { return leader(); }

  std::span<const std::int64_t> counts() const { return counts_; }
  std::span<const double> mean_losses() const { return mean_losses_; }

  // Test hook: installs an arbitrary post-initialization state.
  void set_state(std::span<const double> mean_losses,
                 std::span<const std::int64_t> counts);

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  std::vector<double> mean_losses_;
  std::size_t initialized_arms_ = 0;
};

// Standalone EB-TC: explores with the sampler, exploits its recommendation.
class EbTcPolicy final : public Policy {
 public:
  explicit EbTcPolicy(std::size_t num_arms) : sampler_(num_arms) {}

  std::string_view name() const override { return "ebtc"; }
  std::size_t num_arms() const override { return sampler_.num_arms(); }
  DecoupledAction act(Rng& rng) override;
  void observe(const DecoupledAction& action, double explored_loss) override;

  const EbTcSampler& sampler() const { return sampler_; }

 private:
  EbTcSampler sampler_;
};

template <typename T>
concept ExploitRule = requires(T rule, Rng& rng, ArmIndex arm, double x) {
  { rule.sample_exploit(rng) } -> std::same_as<ArmIndex>;
  rule.absorb(arm, x, x);
  { rule.num_arms() } -> std::convertible_to<std::size_t>;
};

// EB-TC explores; the wrapped rule exploits and is updated with the IW
// estimate under the probability EB-TC actually assigned to the drawn arm.
template <ExploitRule Exploiter>
class MixedPolicy final : public Policy {
 public:
  MixedPolicy(Exploiter exploiter, std::string name)
      : exploiter_(std::move(exploiter)),
        sampler_(exploiter_.num_arms()),
        name_(std::move(name)) {}

  std::string_view name() const override { return name_; }
  std::size_t num_arms() const override { return sampler_.num_arms(); }

  DecoupledAction act(Rng& rng) override {
    DecoupledAction action;
    action.exploit = exploiter_.sample_exploit(rng);
    last_draw_ = sampler_.explore(rng);
    action.explore = last_draw_.arm;
    return action;
  }

  void observe(const DecoupledAction& action, double explored_loss) override {
    exploiter_.absorb(action.explore, explored_loss, last_draw_.prob);
    sampler_.observe(action.explore, explored_loss);
  }

  const Exploiter& exploiter() const { return exploiter_; }
  const EbTcSampler& sampler() const { return sampler_; }
  const ExploreDraw& last_draw() const { return last_draw_; }

 private:
  Exploiter exploiter_;
  EbTcSampler sampler_;
  std::string name_;
  ExploreDraw last_draw_;
};

using MixedFtplPolicy = MixedPolicy<FtplPolicy>;
using MixedFtrlPolicy = MixedPolicy<FtrlPolicy>;

}  // namespace decoupled

#endif  // DECOUPLED_EBTC_H_
