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

#include "lpb/environments.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "gtest/gtest.h"
#include "lpb/random.h"

namespace lpb {
namespace {

std::vector<Arm> argsort_desc(std::span<const double> v) {
  std::vector<Arm> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Arm a, Arm b) { return v[a] > v[b]; });
  return idx;
}

TEST(GenerateModelTest, ThreeArmsSixStatesCoverEveryPermutation) {
  Rng rng(1);
  const auto model = generate_model(3, 6, rng);
  std::set<std::vector<Arm>> seen;
  for (const auto& o : model.orderings()) {
    seen.insert(std::vector<Arm>(o.order().begin(), o.order().end()));
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(GenerateModelTest, SingleArm) {
  Rng rng(1);
  const auto model = generate_model(1, 1, rng);
  EXPECT_EQ(model.num_arms(), 1);
  EXPECT_EQ(model.ordering(0)[0], 0);
}

TEST(GenerateModelTest, ReproducibleAndDistinct) {
  Rng a(99), b(99);
  const auto ma = generate_model(10, 5, a);
  const auto mb = generate_model(10, 5, b);
  EXPECT_EQ(ma.orderings(), mb.orderings());
  EXPECT_EQ(ma.num_states(), 5);
}

TEST(GenerateModelTest, TooManyStatesThrows) {
  Rng rng(1);
  EXPECT_THROW(generate_model(3, 7, rng), std::domain_error);
}

TEST(GenerateInstanceTest, SameScaleTopMeanRange) {
  Rng rng(2);
  const auto model = generate_model(10, 5, rng);
  SyntheticConfig config;
  for (int i = 0; i < 500; ++i) {
    const auto inst = generate_instance(model, i % 5, config, rng);
    const double top = inst.means[best_arm(model.ordering(i % 5))];
    EXPECT_GE(top, 11.0);
    EXPECT_LE(top, 12.0);
  }
}

TEST(GenerateInstanceTest, VariedScaleTopMeanRange) {
  Rng rng(3);
  const auto model = generate_model(10, 5, rng);
  SyntheticConfig config;
  config.varied_scale = true;
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 2000; ++i) {
    const auto inst = generate_instance(model, i % 5, config, rng);
    const double top = inst.means[best_arm(model.ordering(i % 5))];
    lo = std::min(lo, top);
    hi = std::max(hi, top);
  }
  EXPECT_GE(lo, 8.0);
  EXPECT_LE(hi, 12.0);
  EXPECT_LT(lo, 8.1);  // the whole interval is used
  EXPECT_GT(hi, 11.9);
}

TEST(GenerateInstanceTest, AdjacentGapsWithinBounds) {
  Rng rng(4);
  for (bool varied : {false, true}) {
    SyntheticConfig config;
    config.varied_scale = varied;
    const auto model = generate_model(10, 5, rng);
    for (int i = 0; i < 200; ++i) {
      const State z = i % 5;
      const auto inst = generate_instance(model, z, config, rng);
      EXPECT_TRUE(is_consistent(inst.means, model.ordering(z), 0.0));
      const auto& o = model.ordering(z);
      for (int j = 0; j + 1 < 10; ++j) {
        const double gap = inst.means[o[j]] - inst.means[o[j + 1]];
        EXPECT_GE(gap, 0.2 - 1e-12);
        EXPECT_LE(gap, 0.25 + 1e-12);
      }
    }
  }
}

TEST(GenerateInstanceTest, ScaleModesShareTheOrdering) {
  Rng rng(5);
  const auto model = generate_model(8, 3, rng);
  SyntheticConfig same, varied;
  same.varied_scale = false;
  varied.varied_scale = true;
  for (State z = 0; z < 3; ++z) {
    Rng r1(z), r2(z);
    const auto a = generate_instance(model, z, same, r1);
    const auto b = generate_instance(model, z, varied, r2);
    EXPECT_EQ(argsort_desc(a.means), argsort_desc(b.means));
  }
}

TEST(GenerateInstanceTest, UsesTheModelArmCount) {
  Rng rng(6);
  const auto model = generate_model(4, 2, rng);
  SyntheticConfig config;  // k = 10 in the config is ignored
  EXPECT_EQ(generate_instance(model, 0, config, rng).num_arms(), 4);
  EXPECT_THROW(generate_instance(model, 2, config, rng), std::domain_error);
}

TEST(ExpectedMeanTableTest, MidpointsOfTheDrawDistribution) {
  const LatentPreferenceModel model({PreferenceOrdering({1, 0, 2})});
  SyntheticConfig config;
  config.k = 3;
  const auto table = expected_mean_table(model, config);
  // Top arm: midpoint of [9 + 0.6, 10.6]; each step costs 0.2 + 0.025.
  EXPECT_NEAR(table[0][1], 10.1, 1e-12);
  EXPECT_NEAR(table[0][0], 9.875, 1e-12);
  EXPECT_NEAR(table[0][2], 9.65, 1e-12);
}

TEST(SampleRewardTest, ZeroNoiseReturnsTheMean) {
  Rng rng(1);
  const BanditInstance inst{0, {2.5, 1.0}, 0.0};
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_reward(inst, 0, rng), 2.5);
}

TEST(SampleRewardTest, EmpiricalMeanWithinClt) {
  Rng rng(12);
  const BanditInstance inst{0, {4.0}, 1.5};
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += sample_reward(inst, 0, rng);
  EXPECT_NEAR(s / n, 4.0, 4.0 * 1.5 / std::sqrt(n));
}

TEST(SampleRewardTest, ReproducibleStream) {
  Rng a(5), b(5);
  const BanditInstance inst{0, {0.0, 1.0}, 1.0};
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(sample_reward(inst, i % 2, a), sample_reward(inst, i % 2, b));
  }
}

TEST(RatingsMeansTest, AffineMapOntoOneToFive) {
  EXPECT_EQ(ratings_means(std::vector<double>{0.0, 0.5, 1.0}),
            (std::vector<double>{1.0, 3.0, 5.0}));
  const auto two = ratings_means(std::vector<double>{0.2, 0.8});
  EXPECT_DOUBLE_EQ(two[0], 1.0);
  EXPECT_DOUBLE_EQ(two[1], 5.0);
}

TEST(RatingsMeansTest, PreservesOrder) {
  const std::vector<double> b = {0.3, 0.9, 0.1, 0.55, 0.7};
  EXPECT_EQ(argsort_desc(ratings_means(b)), argsort_desc(b));
}

TEST(RatingsMeansTest, ConstantUtilitiesThrow) {
  try {
    ratings_means(std::vector<double>{0.4, 0.4});
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_STREQ(e.what(), "degenerate utilities");
  }
}

TEST(RescaleInstanceTest, EndpointsOrderAndInterval) {
  Rng rng(8);
  const std::vector<double> bar = {1.0, 2.2, 5.0, 3.7};
  for (int i = 0; i < 1000; ++i) {
    const auto r = rescale_instance(bar, 1.5, rng);
    EXPECT_DOUBLE_EQ(r.means[0], r.low);
    EXPECT_NEAR(r.means[2], r.high, 1e-12);
    EXPECT_GE(r.high - r.low, 1.5 - 1e-12);
    EXPECT_LE(r.high - r.low, 4.0);
    EXPECT_GE(r.low, 1.0);
    EXPECT_LE(r.high, 5.0);
    EXPECT_EQ(argsort_desc(r.means), argsort_desc(bar));
  }
}

TEST(RatingsInstanceTest, MeansStayInRange) {
  Rng rng(9);
  RatingsConfig config;
  config.utilities = {{0.1, 0.9, 0.5}, {0.8, 0.2, 0.4}};
  const auto table = ratings_mean_table(config.utilities);
  for (bool varied : {false, true}) {
    config.varied_scale = varied;
    for (int i = 0; i < 200; ++i) {
      const auto inst = make_ratings_instance(table, i % 2, config, rng);
      for (double mu : inst.means) {
        EXPECT_GE(mu, 1.0);
        EXPECT_LE(mu, 5.0);
      }
      if (!varied) EXPECT_EQ(inst.means, table[i % 2]);
    }
  }
}

TEST(RatingsInstanceTest, NoiseDefaults) {
  RatingsConfig config;
  EXPECT_NEAR(config.effective_noise_std(), std::sqrt(0.5), 1e-15);
  config.varied_scale = true;
  EXPECT_EQ(config.effective_noise_std(), 0.0);
  config.rating_noise_std = 0.3;
  EXPECT_EQ(config.effective_noise_std(), 0.3);
}

TEST(RatingsConfigTest, Validation) {
  RatingsConfig config;
  config.utilities = {{0.1, 1.2}};
  EXPECT_THROW(config.validate(), std::domain_error);
  config.utilities = {{0.1, 0.2}};
  config.min_interval = 4.0;
  EXPECT_THROW(config.validate(), std::domain_error);
  config.min_interval = 1.5;
  EXPECT_NO_THROW(config.validate());
}

TEST(ActiveActionSetTest, FullSet) {
  Rng rng(1);
  EXPECT_EQ(active_action_set(5, 5, {}, rng), (std::vector<Arm>{0, 1, 2, 3, 4}));
}

TEST(ActiveActionSetTest, DistinctAndInRange) {
  Rng rng(2);
  std::map<Arm, int> hits;
  for (int i = 0; i < 2000; ++i) {
    const auto s = active_action_set(20, 6, {}, rng);
    ASSERT_EQ(s.size(), 6u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<Arm>(s.begin(), s.end()).size(), 6u);
    for (Arm a : s) ++hits[a];
  }
  // Each arm appears with probability 6/20.
  for (const auto& [arm, n] : hits) EXPECT_NEAR(n, 600.0, 5.0 * std::sqrt(2000 * 0.3 * 0.7));
}

TEST(ActiveActionSetTest, SingleGenreIsPlainSampling) {
  Rng rng(3);
  const std::vector<int> one(10, 0);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 2000; ++i) {
    const auto s = active_action_set(10, 4, one, rng);
    EXPECT_EQ(std::set<Arm>(s.begin(), s.end()).size(), 4u);
    for (Arm a : s) ++hits[a];
  }
  for (int n : hits) EXPECT_NEAR(n, 800.0, 5.0 * std::sqrt(2000 * 0.4 * 0.6));
}

TEST(ActiveActionSetTest, TwoGenresAreStratified) {
  Rng rng(4);
  const std::vector<int> genres = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  for (int i = 0; i < 100; ++i) {
    const auto s = active_action_set(10, 4, genres, rng);
    int first = 0;
    for (Arm a : s) first += genres[a] == 0;
    EXPECT_EQ(first, 2);
  }
}

TEST(ActiveActionSetTest, SmallGenresRunOutGracefully) {
  Rng rng(5);
  const std::vector<int> genres = {0, 1, 1, 1, 1, 1};
  const auto s = active_action_set(6, 5, genres, rng);
  EXPECT_EQ(std::set<Arm>(s.begin(), s.end()).size(), 5u);
  EXPECT_TRUE(std::find(s.begin(), s.end(), 0) != s.end());
}

TEST(ActiveActionSetTest, OversizedThrows) {
  Rng rng(6);
  EXPECT_THROW(active_action_set(3, 4, {}, rng), std::domain_error);
}

TEST(SerializationTest, InstanceAndConfigRoundTrip) {
  const BanditInstance inst{2, {1.25, -3.5, 0.1}, 0.7};
  const auto back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(back.latent_state, 2);
  EXPECT_EQ(back.means, inst.means);
  EXPECT_EQ(back.noise_std, 0.7);

  SyntheticConfig c;
  c.k = 7;
  c.gap = 0.3;
  c.varied_scale = true;
  const auto c2 = synthetic_config_from_json(synthetic_config_to_json(c));
  EXPECT_EQ(c2.k, 7);
  EXPECT_EQ(c2.gap, 0.3);
  EXPECT_TRUE(c2.varied_scale);
}

TEST(SyntheticConfigTest, Validation) {
  SyntheticConfig c;
  c.gap = 0.0;
  EXPECT_THROW(c.validate(), std::domain_error);
  c = {};
  c.noise_std = 0.0;
  EXPECT_THROW(c.validate(), std::domain_error);
  c = {};
  c.gap_jitter = -1.0;
  EXPECT_THROW(c.validate(), std::domain_error);
}

}  // namespace
}  // namespace lpb
