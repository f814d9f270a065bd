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

// Reward-generating environments.
//
// Synthetic: each state gets a random ordering. An instance's top arm mean is
// drawn from U(C + gap*k, C + gap*k + 1), or from
// U(C_varied + gap*k, C_varied + gap*k + spread*k) when scales vary, and each
// following arm along the ordering is lower by gap + U(0, jitter).
//
// Ratings: per-state utilities in [0, 1] are mapped affinely onto the rating
// scale [1, 5]; with varied scales each instance is further squeezed onto a
// random sub-interval [eta, upsilon] of length at least zeta.

#ifndef LPB_ENVIRONMENTS_H_
#define LPB_ENVIRONMENTS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "lpb/algorithms.h"
#include "lpb/model.h"
#include "lpb/random.h"

namespace lpb {

struct SyntheticConfig {
  int k = 10;
  int m = 5;
  double base_level = 9.0;     // C
  double gap = 0.2;            // Delta
  double gap_jitter = 0.05;    // epsilon
  double varied_base = 6.0;    // C-bar
  double scale_spread = 0.4;   // gamma
  double noise_std = 1.0;      // sigma
  bool varied_scale = false;

  void validate() const;
  // Support [lo, hi) of the top arm's mean.
  double top_mean_low() const;
  double top_mean_high() const;
};

// m distinct uniformly random permutations of [k]. Throws when m > k!.
LatentPreferenceModel generate_model(int k, int m, Rng& rng);

BanditInstance generate_instance(const LatentPreferenceModel& model, State z,
                                 const SyntheticConfig& config, Rng& rng);

// Expected instance means per state under `config`: the top arm sits at the
// middle of its draw interval and each step down costs gap + jitter / 2.
MeanTable expected_mean_table(const LatentPreferenceModel& model,
                              const SyntheticConfig& config);

double sample_reward(const BanditInstance& instance, Arm arm, Rng& rng);

struct RatingsConfig {
  MeanTable utilities;  // [state][arm], entries in [0, 1]
  double min_interval = 1.5;  // zeta
  // Unset: sqrt(0.5) with shared scales, 0 with varied scales.
  std::optional<double> rating_noise_std;
  bool varied_scale = false;
  int active_set_size = 300;
  std::vector<int> genres;  // per-arm labels; empty when unavailable

  void validate() const;
  double effective_noise_std() const;
};

// 1 + 4 (b - min b) / (max b - min b). Throws on constant utilities.
std::vector<double> ratings_means(std::span<const double> utilities);

// ratings_means applied to every state.
MeanTable ratings_mean_table(const MeanTable& utilities);

struct RescaledMeans {
  std::vector<double> means;
  double low;   // eta
  double high;  // upsilon
};

// eta ~ U(1, 5 - zeta), upsilon ~ U(eta + zeta, 5), then [1, 5] -> [eta, upsilon].
RescaledMeans rescale_instance(std::span<const double> rating_means,
                               double min_interval, Rng& rng);

// One user of the ratings environment in latent state z.
BanditInstance make_ratings_instance(const MeanTable& rating_means, State z,
                                     const RatingsConfig& config, Rng& rng);

// `size` distinct arms, ascending. With genre labels the draw cycles through
// genres in ascending label order taking one uniform arm per genre per cycle.
std::vector<Arm> active_action_set(int num_arms, int size,
                                   std::span<const int> genres, Rng& rng);

nlohmann::json instance_to_json(const BanditInstance& instance);
BanditInstance instance_from_json(const nlohmann::json& doc);
nlohmann::json synthetic_config_to_json(const SyntheticConfig& config);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& doc);

}  // namespace lpb

#endif  // LPB_ENVIRONMENTS_H_
