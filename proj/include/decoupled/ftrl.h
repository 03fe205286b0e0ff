#ifndef DECOUPLED_FTRL_H_
#define DECOUPLED_FTRL_H_

// Decoupled-Tsallis-INF: FTRL with the beta-Tsallis entropy for
// exploitation, exploration proportional to w^(1 - beta/2).

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "decoupled/core.h"
#include "decoupled/rng.h"

namespace decoupled {

struct FtrlParams {
  double beta = 2.0 / 3.0;  // Tsallis exponent in (0, 1)
  double c = 2.0;           // eta_t = c / sqrt(t)
  std::size_t num_arms = 2;

  void validate() const;
  // Stochastic-regime guarantee range 0 < beta <= 2/3.
  bool in_stochastic_guarantee_range() const {
    return beta > 0.0 && beta <= 2.0 / 3.0 + 1e-15;
  }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double ftrl_learning_rate(std::int64_t t, const FtrlParams& params);

struct TsallisSolveInfo {
  double nu = 0.0;  // Lagrange multiplier of the simplex constraint
  int iterations = 0;
  double residual = 0.0;  // |sum w - 1| before the final renormalization
};

// Simplex minimizer of <w, L> - (1/eta) sum_i (w_i^beta - beta w_i) / (beta (1 - beta))
// for a loss-gap vector `gap` (min entry 0). Stationarity gives
//   w_i(nu) = (1 + eta (1 - beta) (gap_i + nu))^(-1 / (1 - beta)),
// and nu is the root of sum_i w_i(nu) = 1, found by safeguarded Newton.
// Throws SolverError if 200 iterations do not reach |sum w - 1| <= 1e-10.
std::vector<double> solve_weights(std::span<const double> gap, double eta,
                                  double beta);
TsallisSolveInfo solve_weights_into(std::span<const double> gap, double eta,
                                    double beta, std::span<double> out);

// probs_i proportional to w_i^(1 - beta/2).
ExplorationDist exploration_from_weights(std::span<const double> w, double beta);
void exploration_from_weights_into(std::span<const double> w, double beta,
                                   ExplorationDist& out);

class FtrlPolicy final : public Policy {
 public:
  explicit FtrlPolicy(const FtrlParams& params);

  std::string_view name() const override { return "ftrl"; }
  std::size_t num_arms() const override { return params_.num_arms; }

  DecoupledAction act(Rng& rng) override;
  void observe(const DecoupledAction& action, double explored_loss) override;
  void update(const DecoupledAction& action, double observed,
              const ExplorationDist& dist);

  ArmIndex sample_exploit(Rng& rng);
  void absorb(ArmIndex arm, double loss, double prob);

  // Solves for w_t at the current state (no RNG use).
  std::span<const double> compute_weights();

  double current_learning_rate() const { return ftrl_learning_rate(round_, params_); }
  const FtrlParams& params() const { return params_; }
  const CumLossEstimate& estimate() const { return estimate_; }
  std::span<const double> weights() const { return weights_; }
  const ExplorationDist& exploration() const { return dist_; }
  std::int64_t round() const { return round_; }
  const TsallisSolveInfo& last_solve() const { return last_solve_; }

 private:
  FtrlParams params_;
  CumLossEstimate estimate_;
  std::int64_t round_ = 1;
  std::vector<double> weights_;
  ExplorationDist dist_;
  TsallisSolveInfo last_solve_;
};

}  // namespace decoupled

#endif  // DECOUPLED_FTRL_H_
