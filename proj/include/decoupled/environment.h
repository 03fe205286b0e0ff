#ifndef DECOUPLED_ENVIRONMENT_H_
#define DECOUPLED_ENVIRONMENT_H_

// Oblivious loss generators. Means are a deterministic function of the round
// t (1-based); realized losses are Bernoulli draws of those means.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "decoupled/core.h"
#include "decoupled/rng.h"

namespace decoupled {

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t num_arms() const = 0;
  // Writes mu_t into `out` (size K).
  virtual void means_at(std::int64_t t, std::span<double> out) const = 0;

  // Fills `out` with mu_t and one Bernoulli(mu_{t,i}) loss per arm, drawn in
  // arm order from `rng`.
  void step(std::int64_t t, Rng& rng, EnvironmentStep& out) const;
  EnvironmentStep step(std::int64_t t, Rng& rng) const;
};

class StochasticEnv final : public Environment {
 public:
  explicit StochasticEnv(std::vector<double> means);

  std::string_view name() const override { return "stochastic"; }
  std::size_t num_arms() const override { return means_.size(); }
  void means_at(std::int64_t t, std::span<double> out) const override;

  std::span<const double> means() const { return means_; }
  // False when the minimum mean is attained by more than one arm.
  bool has_unique_best() const;

 private:
  std::vector<double> means_;
};

// Phase n = 1, 2, ... lasts floor(growth^n) rounds. Odd phases have means
// 0 for the optimal arm and delta for the rest; even phases 1 - delta and 1.
class AlternatingAdversarialEnv final : public Environment {
 public:
  AlternatingAdversarialEnv(std::size_t num_arms, double delta,
                            double growth = 1.6, ArmIndex optimal_arm = 0);

  std::string_view name() const override { return "alternating"; }
  std::size_t num_arms() const override { return num_arms_; }
  void means_at(std::int64_t t, std::span<double> out) const override;

  // 1-based phase index containing round t.
  int phase_of(std::int64_t t) const;
  // Last round of each phase, phase_ends()[n-1] for phase n.
  std::span<const std::int64_t> phase_ends() const { return phase_ends_; }
  ArmIndex optimal_arm() const { return optimal_arm_; }
  double delta() const { return delta_; }

 private:
  std::size_t num_arms_;
  double delta_;
  double growth_;
  ArmIndex optimal_arm_;
  std::vector<std::int64_t> phase_ends_;
};

// Offset o_t added to every base mean; bounded so means stay in [0, 1].
struct OffsetSchedule {
  enum class Kind { kConstant, kSinusoid };
  Kind kind = Kind::kSinusoid;
  double amplitude = 0.1;  // constant value, or peak of the sinusoid
  double period = 1000.0;

  double at(std::int64_t t) const;
};

// Stochastically constrained adversary: mu_{t,i} = base_i + o_t, so pairwise
// mean differences never change.
class ScaEnv final : public Environment {
 public:
  ScaEnv(std::vector<double> base_means, OffsetSchedule schedule);

  std::string_view name() const override { return "sca"; }
  std::size_t num_arms() const override { return base_means_.size(); }
  void means_at(std::int64_t t, std::span<double> out) const override;

  double offset_at(std::int64_t t) const;
  std::span<const double> base_means() const { return base_means_; }

 private:
  std::vector<double> base_means_;
  OffsetSchedule schedule_;
  double max_offset_;  // 1 - max base mean
};

}  // namespace decoupled

#endif  // DECOUPLED_ENVIRONMENT_H_
