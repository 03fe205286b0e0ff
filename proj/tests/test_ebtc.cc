#include <cmath>
#include <cstdint>
#include <vector>

#include "decoupled/ebtc.h"
#include "decoupled/environment.h"
#include "decoupled/rng.h"
#include "doctest.h"

using namespace decoupled;

TEST_CASE("symmetric state: leader 0, challenger 1") {
  EbTcSampler sampler(2);
  const std::vector<double> means = {0.5, 0.5};
  const std::vector<std::int64_t> counts = {4, 4};
  sampler.set_state(means, counts);
  CHECK(sampler.leader() == 0);
  CHECK(sampler.challenger() == 1);
}

TEST_CASE("challenger has the smallest standardized gap") {
  EbTcSampler sampler(3);
  const std::vector<double> means = {0.1, 0.5, 0.9};
  const std::vector<std::int64_t> counts = {10, 10, 10};
  sampler.set_state(means, counts);
  CHECK(sampler.leader() == 0);
  CHECK(sampler.challenger() == 1);

  // Fewer samples on arm 2 shrink its transportation cost below arm 1's.
  const std::vector<std::int64_t> skewed = {1000, 1000, 1};
  sampler.set_state(means, skewed);
  CHECK(sampler.challenger() == 2);
}

TEST_CASE("recommendation is the empirical argmin") {
  EbTcSampler sampler(3);
  const std::vector<std::int64_t> counts = {3, 3, 3};
  const std::vector<double> means = {0.3, 0.2, 0.9};
  sampler.set_state(means, counts);
  CHECK(sampler.recommend() == 1);
  const std::vector<double> equal = {0.4, 0.4, 0.4};
  sampler.set_state(equal, counts);
  CHECK(sampler.recommend() == 0);
}

TEST_CASE("leader and challenger are each explored half the time") {
  EbTcSampler sampler(3);
  const std::vector<double> means = {0.1, 0.5, 0.9};
  const std::vector<std::int64_t> counts = {10, 10, 10};
  sampler.set_state(means, counts);
  Rng rng(31);
  const int n = 100'000;
  int leader = 0, other = 0;
  for (int i = 0; i < n; ++i) {
    const auto draw = sampler.explore(rng);
    CHECK(draw.prob == 0.5);
    if (draw.arm == 0) ++leader;
    else if (draw.arm != 1) ++other;
  }
  CHECK(other == 0);
  CHECK(std::abs(leader / static_cast<double>(n) - 0.5) <= 4 * std::sqrt(0.25 / n));
}

TEST_CASE("initialization explores arms in order with certainty") {
  EbTcSampler sampler(4);
  Rng rng(1);
  for (ArmIndex k = 0; k < 4; ++k) {
    CHECK_FALSE(sampler.initialized());
    const auto draw = sampler.explore(rng);
    CHECK(draw.arm == k);
    CHECK(draw.prob == 1.0);
    sampler.observe(draw.arm, 0.5);
  }
  CHECK(sampler.initialized());
  CHECK(sampler.explore(rng).prob == 0.5);
}

TEST_CASE("mixed policy scales its estimate by the EB-TC probability") {
  MixedFtplPolicy policy(FtplPolicy({3.0, 2.0, 3}), "mixed-ftpl");
  Rng rng(6);
  for (int t = 0; t < 3; ++t) {
    const auto action = policy.act(rng);
    CHECK(action.explore == static_cast<ArmIndex>(t));
    CHECK(policy.last_draw().prob == 1.0);
    policy.observe(action, 0.0);
  }
  for (int t = 0; t < 200; ++t) {
    const auto action = policy.act(rng);
    CHECK(policy.last_draw().prob == 0.5);
    const double before = policy.exploiter().estimate().total()[action.explore];
    policy.observe(action, 0.3);
    const double after = policy.exploiter().estimate().total()[action.explore];
    CHECK(after - before == doctest::Approx(0.6).epsilon(1e-12));
  }
}

TEST_CASE("two-atom restriction keeps the estimate unbiased") {
  const std::vector<double> loss = {0.7, 0.2, 0.9};
  // Atoms 0 and 1 carry probability 1/2 each.
  const double expected0 = 0.5 * (loss[0] / 0.5);
  const double expected1 = 0.5 * (loss[1] / 0.5);
  CHECK(expected0 == doctest::Approx(loss[0]).epsilon(1e-15));
  CHECK(expected1 == doctest::Approx(loss[1]).epsilon(1e-15));
}

TEST_CASE("EB-TC identifies the best arm of the five-arm instance") {
  EbTcPolicy policy(5);
  StochasticEnv env({0.4, 0.45, 0.55, 0.7, 0.8});
  Rng env_rng(derive_seed(2, 0, 0));
  Rng rng(derive_seed(2, 0, 1));
  EnvironmentStep step;
  for (std::int64_t t = 1; t <= 10'000; ++t) {
    env.step(t, env_rng, step);
    const auto action = policy.act(rng);
    policy.observe(action, step.losses[action.explore]);
  }
  CHECK(policy.sampler().recommend() == 0);
  for (auto c : policy.sampler().counts()) CHECK(c > 0);
}

TEST_CASE("mixed FTRL runs end to end") {
  MixedFtrlPolicy policy(FtrlPolicy({2.0 / 3.0, 2.0, 4}), "mixed-ftrl");
  CHECK(policy.name() == "mixed-ftrl");
  Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    const auto action = policy.act(rng);
    CHECK(action.exploit < 4);
    policy.observe(action, rng.uniform());
  }
}
