#ifndef DECOUPLED_CORE_H_
#define DECOUPLED_CORE_H_

// Shared domain types for decoupled bandits: each round the learner picks
// one arm to exploit (loss suffered, not seen) and one arm to explore (loss
// seen, not suffered).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "decoupled/rng.h"

namespace decoupled {

using ArmIndex = std::size_t;

struct DecoupledAction {
  ArmIndex exploit = 0;
  ArmIndex explore = 0;

  friend bool operator==(const DecoupledAction&,
                         const DecoupledAction&) = default;
};

// Realized losses plus the conditional means they were drawn from. Means are
// carried so regret can be accounted without averaging realized noise.
struct EnvironmentStep {
  std::vector<double> losses;
  std::vector<double> means;
};

// Throws std::out_of_range when `arm >= num_arms`.
void check_arm(ArmIndex arm, std::size_t num_arms);

// Importance-weighted cumulative loss estimate together with its loss-gap
// vector gap[i] = total[i] - min_j total[j].
class CumLossEstimate {
 public:
  explicit CumLossEstimate(std::size_t num_arms);

  std::size_t size() const { return total_.size(); }
  std::span<const double> total() const { return total_; }
  std::span<const double> gap() const { return gap_; }
  double min_total() const { return min_total_; }
  // Lowest-index arm attaining the minimum total.
  ArmIndex leader() const { return leader_; }

  // Adds a nonnegative amount to one arm and refreshes the gap vector in O(K).
  void add(ArmIndex arm, double amount);

 private:
  void refresh();

  std::vector<double> total_;
  std::vector<double> gap_;
  double min_total_ = 0.0;
  ArmIndex leader_ = 0;
};

// One-hot importance-weighted estimate: value at `arm`, zero elsewhere.
struct SparseEstimate {
  ArmIndex arm = 0;
  double value = 0.0;

  std::vector<double> dense(std::size_t num_arms) const;
};

// observed_loss / probs[explore_arm] at the explored arm. Throws
// std::invalid_argument if that probability is not strictly positive.
SparseEstimate iw_estimate(double observed_loss, ArmIndex explore_arm,
                           std::span<const double> probs);

// Distribution over arms used to draw the explore arm. `weights` are the
// unnormalized masses; `ranks` is filled only by policies that rank arms
// (1 = smallest cumulative loss).
struct ExplorationDist {
  std::vector<double> weights;
  std::vector<double> probs;
  std::vector<std::size_t> ranks;

  std::size_t size() const { return probs.size(); }
  // Normalizes `weights` into `probs`.
  void normalize();
  // Linear-scan inverse CDF for u in [0, 1).
  ArmIndex sample(double u) const;
};

// Inverse-CDF draw from an arbitrary probability vector (linear scan).
// Falls back to the last arm with positive mass on rounding overshoot.
ArmIndex sample_from(std::span<const double> probs, double u);

// Pseudo-regret bookkeeping against the best fixed arm in hindsight.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(std::size_t num_arms);

  void record_round(const EnvironmentStep& step, const DecoupledAction& action);

  double pseudo_regret() const;
  // Best fixed arm so far; exact ties go to the lowest index.
  ArmIndex best_arm() const;
  std::int64_t rounds() const { return rounds_; }
  double cum_exploit_mean() const { return cum_exploit_mean_; }
  std::span<const double> cum_arm_means() const { return cum_arm_means_; }

 private:
  double cum_exploit_mean_ = 0.0;
  std::vector<double> cum_arm_means_;
  std::int64_t rounds_ = 0;
};

// Common surface the harness drives. act() draws both arms for the current
// round; observe() feeds back the loss of the explored arm.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t num_arms() const = 0;
  virtual DecoupledAction act(Rng& rng) = 0;
  virtual void observe(const DecoupledAction& action, double explored_loss) = 0;
};

// Lowest-index argmin / argmax.
ArmIndex argmin(std::span<const double> values);
ArmIndex argmax(std::span<const double> values);

}  // namespace decoupled

#endif  // DECOUPLED_CORE_H_
