// Copyright 2026 The LPB Bandits Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lpb/isotonic.h"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"
#include "oracles/oracles.h"

namespace lpb {
namespace {

PreferenceOrdering order_of(std::vector<Arm> v) {
  return PreferenceOrdering(std::move(v));
}

PreferenceOrdering random_order(int k, std::mt19937_64& rng) {
  std::vector<Arm> v(k);
  std::iota(v.begin(), v.end(), 0);
  std::shuffle(v.begin(), v.end(), rng);
  return PreferenceOrdering(v);
}

TEST(FitPavaTest, ConsistentTargetsAreUnchanged) {
  const auto fit = fit_pava(std::vector<double>{3, 2, 1},
                            std::vector<double>{1, 1, 1}, order_of({0, 1, 2}));
  EXPECT_EQ(fit.fitted, (std::vector<double>{3, 2, 1}));
  EXPECT_EQ(fit.active_constraints, 0);
  EXPECT_DOUBLE_EQ(fit.objective, 0.0);
}

TEST(FitPavaTest, TwoEqualWeightViolatorsPool) {
  const auto fit = fit_pava(std::vector<double>{1, 3}, std::vector<double>{1, 1},
                            order_of({0, 1}));
  EXPECT_DOUBLE_EQ(fit.fitted[0], 2.0);
  EXPECT_DOUBLE_EQ(fit.fitted[1], 2.0);
  EXPECT_EQ(fit.active_constraints, 1);
}

TEST(FitPavaTest, WeightedPool) {
  const auto fit = fit_pava(std::vector<double>{1, 3}, std::vector<double>{3, 1},
                            order_of({0, 1}));
  EXPECT_DOUBLE_EQ(fit.fitted[0], 1.5);
  EXPECT_DOUBLE_EQ(fit.fitted[1], 1.5);
  EXPECT_EQ(fit.active_constraints, 1);
}

TEST(FitPavaTest, FourArmChainMatchesPartitionOracle) {
  const std::vector<double> y = {1, 5, 3, 4};
  const std::vector<double> w = {1, 1, 1, 1};
  const std::vector<int> order = {0, 1, 2, 3};
  const auto expected = oracle::isotonic_by_partitions(y, w, order);
  const auto fit = fit_pava(y, w, order_of(order));
  for (int a = 0; a < 4; ++a) {
    EXPECT_NEAR(fit.fitted[a], expected.fitted[a], 1e-12);
    EXPECT_NEAR(fit.fitted[a], 3.25, 1e-12);
  }
  EXPECT_EQ(fit.active_constraints, 2);
}

TEST(FitPavaTest, FourArmChainWithTwoBlocks) {
  const std::vector<double> y = {3, 5, 3, 4};
  const std::vector<double> w = {1, 1, 1, 1};
  const auto fit = fit_pava(y, w, order_of({0, 1, 2, 3}));
  EXPECT_EQ(fit.fitted, (std::vector<double>{4, 4, 3.5, 3.5}));
  EXPECT_EQ(fit.active_constraints, 2);
}

TEST(FitPavaTest, OrderingIsAppliedThroughThePermutation) {
  // Same chain as above, stored under a scrambled arm labelling.
  const std::vector<double> y = {4, 3, 5, 3};
  const auto fit = fit_pava(y, std::vector<double>{1, 1, 1, 1},
                            order_of({1, 2, 3, 0}));
  // Chain along the order: y1=3, y2=5, y3=3, y0=4.
  EXPECT_DOUBLE_EQ(fit.fitted[1], 4.0);
  EXPECT_DOUBLE_EQ(fit.fitted[2], 4.0);
  EXPECT_DOUBLE_EQ(fit.fitted[3], 3.5);
  EXPECT_DOUBLE_EQ(fit.fitted[0], 3.5);
}

TEST(FitPavaTest, Errors) {
  const auto p = order_of({0, 1});
  EXPECT_THROW(fit_pava(std::vector<double>{1, 2}, std::vector<double>{0, 0}, p),
               std::invalid_argument);
  EXPECT_THROW(
      fit_pava(std::vector<double>{1, 2}, std::vector<double>{1, -1}, p),
      std::domain_error);
  EXPECT_THROW(fit_pava(std::vector<double>{1}, std::vector<double>{1, 1}, p),
               std::domain_error);
}

TEST(FitPavaTest, NoDataMessage) {
  try {
    fit_pava(std::vector<double>{1, 2}, std::vector<double>{0, 0},
             order_of({0, 1}));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "no data");
  }
}

TEST(FitPavaTest, ZeroWeightTargetsAreIgnored) {
  const auto p = order_of({0, 1, 2});
  const auto a = fit_pava(std::vector<double>{1, 100, 3},
                          std::vector<double>{1, 0, 1}, p);
  const auto b = fit_pava(std::vector<double>{1, -100, 3},
                          std::vector<double>{1, 0, 1}, p);
  EXPECT_EQ(a.fitted, b.fitted);
  EXPECT_DOUBLE_EQ(a.fitted[0], 2.0);
  EXPECT_DOUBLE_EQ(a.fitted[2], 2.0);
}

TEST(FitPavaTest, ZeroWeightFillTakesLessPreferredNeighbour) {
  const auto fit = fit_pava(std::vector<double>{5, 0, 1, 0},
                            std::vector<double>{1, 0, 1, 0},
                            order_of({0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(fit.fitted[1], 1.0);  // next observed arm down the chain
  EXPECT_DOUBLE_EQ(fit.fitted[3], 1.0);  // tail: previous observed arm
  EXPECT_TRUE(is_consistent(fit.fitted, order_of({0, 1, 2, 3}), 0.0));
}

TEST(FitPavaTest, UnfilledArmsStayNan) {
  IsotonicOptions opts;
  opts.fill_unobserved = false;
  const auto fit = fit_pava(std::vector<double>{5, 0, 1},
                            std::vector<double>{1, 0, 1}, order_of({0, 1, 2}),
                            opts);
  EXPECT_TRUE(std::isnan(fit.fitted[1]));
  EXPECT_DOUBLE_EQ(fit.fitted[0], 5.0);
}

TEST(ConstrainedMleTest, SinglePull) {
  ObservationHistory h(2);
  h.record(0, 5.0);
  const auto fit = constrained_mle(h, order_of({0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(fit.fitted[0], 5.0);
  EXPECT_DOUBLE_EQ(fit.fitted[1], 5.0);
  EXPECT_EQ(fit.active_constraints, 0);
}

TEST(ConstrainedMleTest, ConsistentEmpiricalMeansAreKept) {
  ObservationHistory h(3);
  for (double r : {3.0, 3.5}) h.record(0, r);
  h.record(1, 2.0);
  h.record(2, 0.5);
  const auto fit = constrained_mle(h, order_of({0, 1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(fit.fitted[0], 3.25);
  EXPECT_DOUBLE_EQ(fit.fitted[1], 2.0);
  EXPECT_DOUBLE_EQ(fit.fitted[2], 0.5);
  EXPECT_EQ(fit.active_constraints, 0);
}

TEST(ConstrainedMleTest, CountWeightedPool) {
  ObservationHistory h(2);
  h.record(0, 1.0);
  h.record(0, 1.0);
  h.record(1, 3.0);
  const auto fit = constrained_mle(h, order_of({0, 1}), 1.0);
  const auto expected = oracle::isotonic_by_partitions(
      std::vector<double>{1, 3}, std::vector<double>{2, 1},
      std::vector<int>{0, 1});
  EXPECT_NEAR(fit.fitted[0], 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(fit.fitted[1], 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(fit.fitted[0], expected.fitted[0], 1e-12);
  EXPECT_EQ(fit.weights, (std::vector<double>{2.0, 1.0}));
}

TEST(ConstrainedMleTest, NoiseScalesWeightsOnly) {
  ObservationHistory h(3);
  h.record(0, 1.0);
  h.record(1, 4.0);
  h.record(2, 2.0);
  const auto a = constrained_mle(h, order_of({0, 1, 2}), 1.0);
  const auto b = constrained_mle(h, order_of({0, 1, 2}), 3.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a.fitted[i], b.fitted[i], 1e-12);
  EXPECT_NEAR(b.weights[0], 1.0 / 9.0, 1e-15);
}

TEST(ConstrainedMleTest, Errors) {
  ObservationHistory h(2);
  EXPECT_ANY_THROW(constrained_mle(h, order_of({0, 1}), 1.0));
  h.record(0, 1.0);
  EXPECT_ANY_THROW(constrained_mle(h, order_of({0, 1}), 0.0));
}

TEST(ActiveConstraintsTest, ExactTiesInTargetsDoNotCount) {
  const auto fit = fit_pava(std::vector<double>{2, 2}, std::vector<double>{1, 1},
                            order_of({0, 1}));
  EXPECT_EQ(count_active_constraints(fit, order_of({0, 1})), 0);
}

// ---- Properties over random chains ----

class RandomChains : public ::testing::TestWithParam<int> {};

TEST_P(RandomChains, MatchesPartitionOracle) {
  std::mt19937_64 rng(1000 + GetParam());
  std::uniform_real_distribution<double> target(-10.0, 10.0);
  std::uniform_real_distribution<double> weight(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 6);
    std::vector<double> y(k), w(k);
    for (int a = 0; a < k; ++a) {
      y[a] = target(rng);
      w[a] = 10.0 - weight(rng);  // (0, 10]
    }
    const auto p = random_order(k, rng);
    const auto fit = fit_pava(y, w, p);
    const auto expected = oracle::isotonic_by_partitions(y, w, p.order());
    for (int a = 0; a < k; ++a) ASSERT_NEAR(fit.fitted[a], expected.fitted[a], 1e-8);
    EXPECT_NEAR(fit.objective, expected.objective,
                1e-8 * std::max(1.0, expected.objective));
    EXPECT_TRUE(is_consistent(fit.fitted, p, 1e-9));
    EXPECT_GE(fit.active_constraints, 0);
    EXPECT_LE(fit.active_constraints, k - 1);
  }
}

TEST_P(RandomChains, Idempotent) {
  std::mt19937_64 rng(2000 + GetParam());
  std::uniform_real_distribution<double> target(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 12);
    std::vector<double> y(k), w(k);
    for (int a = 0; a < k; ++a) {
      y[a] = target(rng);
      w[a] = 0.1 + (rng() % 100) / 10.0;
    }
    const auto p = random_order(k, rng);
    const auto once = fit_pava(y, w, p);
    const auto twice = fit_pava(once.fitted, w, p);
    for (int a = 0; a < k; ++a) EXPECT_NEAR(twice.fitted[a], once.fitted[a], 1e-12);
    EXPECT_EQ(twice.active_constraints, 0);
  }
}

TEST_P(RandomChains, ZeroWeightCompletionStaysInTheConsistentSet) {
  std::mt19937_64 rng(3000 + GetParam());
  std::uniform_real_distribution<double> target(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 8);
    std::vector<double> y(k), w(k);
    for (int a = 0; a < k; ++a) {
      y[a] = target(rng);
      w[a] = rng() % 3 == 0 ? 0.0 : 1.0 + (rng() % 5);
    }
    w[rng() % k] = 2.0;
    const auto p = random_order(k, rng);
    const auto fit = fit_pava(y, w, p);
    EXPECT_TRUE(is_consistent(fit.fitted, p, 1e-9));
    const auto expected = oracle::isotonic_by_partitions(y, w, p.order());
    for (int a = 0; a < k; ++a) {
      if (w[a] > 0.0) EXPECT_NEAR(fit.fitted[a], expected.fitted[a], 1e-8);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomChains, ::testing::Range(0, 5));

TEST(ObjectiveIdentityTest, IsotonicAndLikelihoodFormsDifferByAConstant) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int hist = 0; hist < 20; ++hist) {
    const int k = 2 + hist % 6;
    const double sigma = 0.5 + (hist % 4) * 0.5;
    ObservationHistory h(k);
    for (int t = 0; t < 30; ++t) {
      h.record(static_cast<Arm>(rng() % k), 5.0 + 2.0 * noise(rng));
    }
    double first = 0.0;
    for (int i = 0; i < 100; ++i) {
      std::vector<double> mu(k);
      for (double& x : mu) x = 10.0 * noise(rng);
      const double diff = oracle::isotonic_form(h.events(), k, mu, sigma) -
                          oracle::likelihood_form(h.events(), mu, sigma);
      if (i == 0) first = diff;
      EXPECT_NEAR(diff, first, 1e-8 * std::max(1.0, std::abs(first)));
    }
  }
}

TEST(ObjectiveIdentityTest, FitObjectiveMatchesIsotonicForm) {
  ObservationHistory h(3);
  for (auto [a, r] : {std::pair{0, 1.0}, {1, 4.0}, {1, 2.0}, {2, 0.0}}) {
    h.record(a, r);
  }
  const auto fit = constrained_mle(h, order_of({0, 1, 2}), 2.0);
  EXPECT_NEAR(fit.objective,
              oracle::isotonic_form(h.events(), 3, fit.fitted, 2.0), 1e-12);
}

}  // namespace
}  // namespace lpb
