#include <cmath>
#include <sstream>
#include <string>

#include "decoupled/ftpl.h"
#include "decoupled/verify.h"
#include "doctest.h"

using namespace decoupled;

TEST_CASE("small-scale suites pass") {
  verify::VerifyOptions options;
  options.scale = 0.02;
  const auto results = verify::run_all(options);
  CHECK(results.size() >= 8);
  for (const auto& r : results) {
    CHECK_MESSAGE(r.passed, r.name << ": " << r.summary);
    CHECK(r.checks > 0);
  }
  std::ostringstream csv;
  verify::write_report_csv(csv, results);
  CHECK(csv.str().rfind("suite,passed,checks,failures,seconds\n", 0) == 0);
}

TEST_CASE("an off-by-one exponent in the exploration weights is caught") {
  verify::SumQOptions options;
  options.states = 500;
  options.weights = [](std::span<const double> gap, double eta, double alpha) {
    // Exponent (alpha + 1) / 2 - 1 instead of (alpha + 1) / 2.
    auto dist = exploration_weights(gap, eta, alpha);
    const double correct = (alpha + 1.0) / 2.0;
    for (double& q : dist.weights) q = std::pow(q, (correct - 1.0) / correct);
    dist.normalize();
    return dist;
  };
  const auto result = verify::sum_q_suite(options);
  CHECK_FALSE(result.passed);
  CHECK(result.failure_count > 0);
}

TEST_CASE("failure messages are capped but counted") {
  verify::SuiteResult r;
  for (int i = 0; i < 50; ++i) r.fail("boom " + std::to_string(i));
  CHECK_FALSE(r.passed);
  CHECK(r.failure_count == 50);
  CHECK(r.failures.size() <= 8);
}
