#include "decoupled/environment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace decoupled {
namespace {

void check_means(std::span<const double> means) {
  if (means.empty()) throw std::invalid_argument("environment needs at least one arm");
  for (double m : means) {
    if (!(m >= 0.0 && m <= 1.0)) {
      throw std::invalid_argument("arm means must lie in [0, 1]");
    }
  }
}

// Stop precomputing phases once this many rounds are covered.
constexpr std::int64_t kPhaseHorizon = std::int64_t{1} << 50;

}  // namespace

void Environment::step(std::int64_t t, Rng& rng, EnvironmentStep& out) const {
  const std::size_t k = num_arms();
  out.means.resize(k);
  out.losses.resize(k);
  means_at(t, out.means);
  for (std::size_t i = 0; i < k; ++i) {
    out.losses[i] = rng.uniform() < out.means[i] ? 1.0 : 0.0;
  }
}

EnvironmentStep Environment::step(std::int64_t t, Rng& rng) const {
  EnvironmentStep out;
  step(t, rng, out);
  return out;
}

// -- StochasticEnv ------------------------------------------------------------

StochasticEnv::StochasticEnv(std::vector<double> means) : means_(std::move(means)) {
  check_means(means_);
}

void StochasticEnv::means_at(std::int64_t, std::span<double> out) const {
  std::copy(means_.begin(), means_.end(), out.begin());
}

bool StochasticEnv::has_unique_best() const {
  const double best = *std::min_element(means_.begin(), means_.end());
  return std::count(means_.begin(), means_.end(), best) == 1;
}

// -- AlternatingAdversarialEnv ------------------------------------------------

AlternatingAdversarialEnv::AlternatingAdversarialEnv(std::size_t num_arms,
                                                     double delta, double growth,
                                                     ArmIndex optimal_arm)
    : num_arms_(num_arms),
      delta_(delta),
      growth_(growth),
      optimal_arm_(optimal_arm) {
  if (num_arms == 0) throw std::invalid_argument("environment needs at least one arm");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!(growth > 1.0)) throw std::invalid_argument("growth must be > 1");
  check_arm(optimal_arm, num_arms);
  std::int64_t end = 0;
  for (int n = 1; end < kPhaseHorizon; ++n) {
    const auto length = static_cast<std::int64_t>(std::floor(std::pow(growth_, n)));
    // floor(growth^n) can be 0 only when growth^n < 1, excluded above.
    end += std::max<std::int64_t>(length, 1);
    phase_ends_.push_back(end);
  }
}

int AlternatingAdversarialEnv::phase_of(std::int64_t t) const {
  if (t < 1) throw std::invalid_argument("rounds are 1-based");
  const auto it = std::lower_bound(phase_ends_.begin(), phase_ends_.end(), t);
  if (it == phase_ends_.end()) throw std::out_of_range("round beyond phase table");
  return static_cast<int>(it - phase_ends_.begin()) + 1;
}

void AlternatingAdversarialEnv::means_at(std::int64_t t, std::span<double> out) const {
  const bool low_phase = phase_of(t) % 2 == 1;
  const double optimal = low_phase ? 0.0 : 1.0 - delta_;
  const double others = low_phase ? delta_ : 1.0;
  std::fill(out.begin(), out.begin() + num_arms_, others);
  out[optimal_arm_] = optimal;
}

// -- ScaEnv -------------------------------------------------------------------

double OffsetSchedule::at(std::int64_t t) const {
  switch (kind) {
    case Kind::kConstant:
      return amplitude;
    case Kind::kSinusoid:
      return amplitude *
             (1.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period)) /
             2.0;
  }
  return 0.0;
}

ScaEnv::ScaEnv(std::vector<double> base_means, OffsetSchedule schedule)
    : base_means_(std::move(base_means)), schedule_(schedule) {
  check_means(base_means_);
  if (!(schedule_.amplitude >= 0.0)) {
    throw std::invalid_argument("offset amplitude must be >= 0");
  }
  if (schedule_.kind == OffsetSchedule::Kind::kSinusoid && !(schedule_.period > 0.0)) {
    throw std::invalid_argument("offset period must be > 0");
  }
  max_offset_ = 1.0 - *std::max_element(base_means_.begin(), base_means_.end());
  // Shrink the amplitude so base + offset never leaves [0, 1].
  schedule_.amplitude = std::min(schedule_.amplitude, max_offset_);
}

double ScaEnv::offset_at(std::int64_t t) const {
  return std::clamp(schedule_.at(t), 0.0, max_offset_);
}

void ScaEnv::means_at(std::int64_t t, std::span<double> out) const {
  const double offset = offset_at(t);
  for (std::size_t i = 0; i < base_means_.size(); ++i) {
    out[i] = std::min(1.0, base_means_[i] + offset);
  }
}

}  // namespace decoupled
