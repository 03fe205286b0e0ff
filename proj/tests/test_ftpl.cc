#include <cmath>
#include <vector>

#include "decoupled/ftpl.h"
#include "decoupled/rng.h"
#include "doctest.h"

using namespace decoupled;

TEST_CASE("learning rate schedule") {
  CHECK(learning_rate(1, {3.0, 2.0, 1}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(learning_rate(4, {3.0, 2.0, 8}) == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(learning_rate(10000, {3.0, 2.0, 8}) == doctest::Approx(0.0141421).epsilon(1e-5));
  CHECK_THROWS(learning_rate(0, {3.0, 2.0, 8}));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(FtplParams{1.0, 2.0, 4}.validate());
  CHECK_THROWS(FtplParams{3.0, 0.0, 4}.validate());
  CHECK_THROWS(FtplParams{3.0, 2.0, 0}.validate());
  CHECK_NOTHROW(FtplParams{3.0, 2.0, 1}.validate());
  CHECK_FALSE(FtplParams{4.0, 2.0, 4}.in_stochastic_guarantee_range());
}

TEST_CASE("Pareto inverse transform") {
  CHECK(pareto_sample(3.0, 0.0) == 1.0);
  CHECK(pareto_sample(1.5, 0.0) == 1.0);
  CHECK(pareto_sample(3.0, 0.5) == doctest::Approx(1.2599210).epsilon(1e-7));
  CHECK(pareto_sample(3.0, 0.875) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exploitation picks the perturbed leader") {
  const std::vector<double> zeros = {0.0, 0.0, 0.0};
  const std::vector<double> r = {1.1, 3.0, 1.5};
  CHECK(select_exploit(zeros, r, 0.7) == 1);

  const std::vector<double> losses = {0.0, 10.0};
  const std::vector<double> r2 = {1.0, 5.0};
  CHECK(select_exploit(losses, r2, 1.0) == 0);

  // A common shift of the losses never changes the choice.
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> l(6), p(6), shifted(6);
    for (std::size_t k = 0; k < 6; ++k) {
      l[k] = 5.0 * rng.uniform();
      p[k] = pareto_sample(3.0, rng.uniform());
      shifted[k] = l[k] + 17.25;
    }
    CHECK(select_exploit(l, p, 0.3) == select_exploit(shifted, p, 0.3));
  }
}

TEST_CASE("exploration weights on a three-arm state") {
  const std::vector<double> gap = {0.0, 2.0, 5.0};
  const auto dist = exploration_weights(gap, 0.5, 3.0);
  CHECK(dist.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist.weights[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(dist.weights[2] == doctest::Approx(4.0 / 49.0).epsilon(1e-12));
  CHECK(dist.weights[2] == doctest::Approx(0.0816327).epsilon(1e-6));
  CHECK(dist.ranks == std::vector<std::size_t>{1, 2, 3});
  double total = 0.0;
  for (double p : dist.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("exploration weights with tied losses use the rank term") {
  const std::vector<double> gap = {0.0, 0.0};
  const auto dist = exploration_weights(gap, 1.0, 3.0);
  CHECK(dist.weights[0] == doctest::Approx(1.0));
  CHECK(dist.weights[1] == doctest::Approx(0.6299605).epsilon(1e-7));

  const std::vector<double> single = {0.0};
  CHECK(exploration_weights(single, 1.0, 3.0).probs == std::vector<double>{1.0});
}

TEST_CASE("ranks follow the gap order, ties by index") {
  const std::vector<double> gap = {3.0, 0.0, 1.0, 1.0};
  const auto dist = exploration_weights(gap, 1.0, 2.0);
  CHECK(dist.ranks == std::vector<std::size_t>{4, 1, 2, 3});
}

TEST_CASE("the explorer cache matches the free function") {
  Rng rng(9);
  FtplExplorer explorer(7, 2.5);
  ExplorationDist dist;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> gap(7);
    for (double& g : gap) g = rng.uniform() < 0.3 ? 0.0 : 4.0 * rng.uniform();
    const double eta = 0.05 + rng.uniform();
    explorer.compute(gap, eta, dist);
    const auto ref = exploration_weights(gap, eta, 2.5);
    for (std::size_t k = 0; k < 7; ++k) {
      CHECK(dist.probs[k] == doctest::Approx(ref.probs[k]).epsilon(1e-14));
    }
  }
}

TEST_CASE("a single-arm policy always plays arm 0") {
  FtplPolicy policy({3.0, 2.0, 1});
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto action = policy.act(rng);
    CHECK(action == DecoupledAction{0, 0});
    policy.observe(action, rng.uniform());
  }
}

TEST_CASE("update adds the importance-weighted loss") {
  FtplPolicy policy({3.0, 2.0, 4});
  ExplorationDist dist;
  dist.probs = {0.25, 0.25, 0.25, 0.25};
  policy.update({0, 2}, 0.5, dist);
  CHECK(policy.estimate().total()[2] == doctest::Approx(2.0));
  CHECK(policy.round() == 2);
  policy.update({0, 1}, 0.0, dist);
  CHECK(policy.estimate().total()[1] == 0.0);
  CHECK(policy.estimate().total()[2] == doctest::Approx(2.0));
  CHECK(policy.round() == 3);
}

TEST_CASE("explore draws follow the exploration distribution") {
  // Fix the estimate so the distribution is the same every round; count
  // the explore arm over 1e6 draws and compare within 4 standard errors.
  const std::vector<double> gap = {0.0, 0.4, 1.3, 2.0};
  const auto dist = exploration_weights(gap, 0.8, 3.0);
  Rng rng(21);
  const int n = 1'000'000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) ++counts[dist.sample(rng.uniform())];
  for (std::size_t k = 0; k < 4; ++k) {
    const double p = dist.probs[k];
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[k] / static_cast<double>(n) - p) <= 4 * se);
  }
}

TEST_CASE("screened exploit sampling matches select_exploit") {
  for (double alpha : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    FtplPolicy policy({alpha, 2.0, 40});
    Rng rng(4);
    for (int t = 0; t < 3000; ++t) {
      const double eta = policy.current_learning_rate();
      const auto action = policy.act(rng);
      CHECK(action.exploit ==
            select_exploit(policy.estimate().gap(), policy.last_perturbations(), eta));
      // Arms with higher index are worse, so gaps spread out over the run.
      const double mean = 0.1 + 0.8 * static_cast<double>(action.explore) / 40.0;
      policy.observe(action, rng.uniform() < mean ? 1.0 : 0.0);
    }
  }
}
