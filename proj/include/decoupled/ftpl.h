#ifndef DECOUPLED_FTPL_H_
#define DECOUPLED_FTPL_H_

// Follow-the-Perturbed-Leader with Pareto perturbations for decoupled
// bandits. Exploitation is the perturbed leader; exploration uses a
// closed-form proxy for the (intractable) exploitation probabilities, built
// from the loss gap and the rank of each arm, so no optimization or
// resampling is needed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "decoupled/core.h"
#include "decoupled/rng.h"

namespace decoupled {

struct FtplParams {
  double alpha = 3.0;  // Pareto shape, > 1
  double c = 2.0;      // learning-rate constant, > 0
  std::size_t num_arms = 2;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  // Whether the stochastic-regime guarantee covers this shape (1 < alpha <= 3).
  bool in_stochastic_guarantee_range() const { return alpha > 1.0 && alpha <= 3.0; }
};

// eta_t = c * K^(1/alpha - 1/2) / sqrt(t).
double learning_rate(std::int64_t t, const FtplParams& params);

// Inverse-CDF Pareto draw (1 - u)^(-1/alpha) for u in [0, 1); result >= 1.
double pareto_sample(double alpha, double uniform);

// argmin_i { losses[i] - perturbations[i] / eta }, lowest index on ties.
// Works on either the cumulative estimate or its gap vector.
ArmIndex select_exploit(std::span<const double> losses,
                        std::span<const double> perturbations, double eta);

// Builds the exploration distribution from a loss-gap vector:
//   q_i = min(1 / (1 + eta * gap_i), rank_i^(-1/alpha))^((alpha + 1) / 2)
// with ranks by ascending gap, ties to the lowest index. O(K log K).
ExplorationDist exploration_weights(std::span<const double> gap, double eta,
                                    double alpha);

// Reusable workspace for exploration_weights. Caches rank_i^(-1/alpha) and
// the sort permutation so a policy step does not allocate.
class FtplExplorer {
 public:
  FtplExplorer(std::size_t num_arms, double alpha);

  void compute(std::span<const double> gap, double eta, ExplorationDist& out);

 private:
  double alpha_;
  double exponent_;  // (alpha + 1) / 2
  std::vector<double> rank_term_;
  std::vector<std::size_t> order_;
};

class FtplPolicy final : public Policy {
 public:
  explicit FtplPolicy(const FtplParams& params);

  std::string_view name() const override { return "ftpl"; }
  std::size_t num_arms() const override { return params_.num_arms; }

  // Draws fresh perturbations, picks the exploit arm, builds p_t and draws
  // the explore arm from it. p_t stays available through exploration().
  DecoupledAction act(Rng& rng) override;
  // IW update with the distribution produced by the last act().
  void observe(const DecoupledAction& action, double explored_loss) override;

  // Same as observe() but with an explicit distribution.
  void update(const DecoupledAction& action, double observed,
              const ExplorationDist& dist);

  // Exploitation rule alone; used when another sampler explores.
  ArmIndex sample_exploit(Rng& rng);
  // IW update of arm `arm` with loss `loss` observed under probability `prob`.
  void absorb(ArmIndex arm, double loss, double prob);

  double current_learning_rate() const { return learning_rate(round_, params_); }
  // Computes p_t for the current state without touching the RNG.
  const ExplorationDist& compute_exploration();

  const FtplParams& params() const { return params_; }
  const CumLossEstimate& estimate() const { return estimate_; }
  const ExplorationDist& exploration() const { return dist_; }
  // Pareto perturbations of the last exploit draw, rebuilt from the stored
  // uniforms (sampling only evaluates them for candidate leaders).
  std::vector<double> last_perturbations() const;
  std::int64_t round() const { return round_; }

 private:
  FtplParams params_;
  CumLossEstimate estimate_;
  std::int64_t round_ = 1;
  FtplExplorer explorer_;
  ExplorationDist dist_;
  std::vector<double> uniforms_;
  int integer_alpha_ = 0;  // alpha when it is a small integer, else 0
};

}  // namespace decoupled

#endif  // DECOUPLED_FTPL_H_
