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
#include <string>

namespace lpb {
namespace {

// k! saturated at `cap`.
std::uint64_t factorial_capped(int k, std::uint64_t cap) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) {
    if (f > cap / static_cast<std::uint64_t>(i)) return cap;
    f *= static_cast<std::uint64_t>(i);
  }
  return f;
}

}  // namespace

void SyntheticConfig::validate() const {
  if (k < 1 || m < 1) throw std::domain_error("k and m must be >= 1");
  if (!(gap > 0.0)) throw std::domain_error("gap must be > 0");
  if (!(gap_jitter >= 0.0)) throw std::domain_error("gap jitter must be >= 0");
  if (!(scale_spread >= 0.0)) throw std::domain_error("spread must be >= 0");
  if (!(noise_std > 0.0)) throw std::domain_error("noise_std must be > 0");
}

double SyntheticConfig::top_mean_low() const {
  return (varied_scale ? varied_base : base_level) + gap * k;
}

double SyntheticConfig::top_mean_high() const {
  return top_mean_low() + (varied_scale ? scale_spread * k : 1.0);
}

LatentPreferenceModel generate_model(int k, int m, Rng& rng) {
  if (k < 1 || m < 1) throw std::domain_error("k and m must be >= 1");
  const std::uint64_t cap = 1ULL << 62;
  const std::uint64_t perms = factorial_capped(k, cap);
  if (static_cast<std::uint64_t>(m) > perms) {
    throw std::domain_error("m exceeds k!: orderings cannot be distinct");
  }

  std::vector<Arm> base(k);
  std::iota(base.begin(), base.end(), 0);
  std::vector<PreferenceOrdering> orderings;

  if (2 * static_cast<std::uint64_t>(m) > perms) {
    // Dense regime: draw m of the k! permutations without replacement.
    std::vector<std::vector<Arm>> all;
    std::vector<Arm> p = base;
    do {
      all.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    std::shuffle(all.begin(), all.end(), rng);
    for (int z = 0; z < m; ++z) orderings.emplace_back(all[z]);
    return LatentPreferenceModel(std::move(orderings));
  }

  std::set<std::vector<Arm>> seen;
  int attempts = 0;
  while (static_cast<int>(orderings.size()) < m) {
    if (attempts++ >= 10 * m) {
      throw std::runtime_error("could not draw distinct orderings");
    }
    std::vector<Arm> p = base;
    std::shuffle(p.begin(), p.end(), rng);
    if (seen.insert(p).second) orderings.emplace_back(std::move(p));
  }
  return LatentPreferenceModel(std::move(orderings));
}

BanditInstance generate_instance(const LatentPreferenceModel& model, State z,
                                 const SyntheticConfig& config, Rng& rng) {
  config.validate();
  if (z < 0 || z >= model.num_states()) {
    throw std::domain_error("latent state out of range");
  }
  const int k = model.num_arms();
  SyntheticConfig c = config;
  c.k = k;
  const PreferenceOrdering& order = model.ordering(z);
  BanditInstance inst;
  inst.latent_state = z;
  inst.noise_std = config.noise_std;
  inst.means.assign(k, 0.0);
  double mean = uniform(rng, c.top_mean_low(), c.top_mean_high());
  inst.means[order[0]] = mean;
  for (int j = 1; j < k; ++j) {
    mean -= c.gap + uniform(rng, 0.0, c.gap_jitter);
    inst.means[order[j]] = mean;
  }
  return inst;
}

MeanTable expected_mean_table(const LatentPreferenceModel& model,
                              const SyntheticConfig& config) {
  SyntheticConfig c = config;
  c.k = model.num_arms();
  MeanTable table(model.num_states(), std::vector<double>(c.k));
  for (State z = 0; z < model.num_states(); ++z) {
    const auto& order = model.ordering(z);
    double mean = 0.5 * (c.top_mean_low() + c.top_mean_high());
    for (int j = 0; j < c.k; ++j) {
      if (j > 0) mean -= c.gap + 0.5 * c.gap_jitter;
      table[z][order[j]] = mean;
    }
  }
  return table;
}

double sample_reward(const BanditInstance& instance, Arm arm, Rng& rng) {
  return normal(rng, instance.means.at(arm), instance.noise_std);
}

void RatingsConfig::validate() const {
  if (utilities.empty()) throw std::domain_error("ratings need utilities");
  for (const auto& row : utilities) {
    if (row.size() != utilities.front().size()) {
      throw std::domain_error("utility rows differ in length");
    }
    for (double u : row) {
      if (!(u >= 0.0 && u <= 1.0)) {
        throw std::domain_error("utilities must lie in [0, 1]");
      }
    }
  }
  if (!(min_interval > 0.0 && min_interval < 4.0)) {
    throw std::domain_error("min_interval must lie in (0, 4)");
  }
  if (active_set_size < 1) throw std::domain_error("active set size >= 1");
  if (!genres.empty() && genres.size() != utilities.front().size()) {
    throw std::domain_error("genre labels must cover every arm");
  }
}

double RatingsConfig::effective_noise_std() const {
  if (rating_noise_std) return *rating_noise_std;
  return varied_scale ? 0.0 : std::sqrt(0.5);
}

std::vector<double> ratings_means(std::span<const double> utilities) {
  if (utilities.empty()) throw std::domain_error("degenerate utilities");
  const auto [lo, hi] = std::minmax_element(utilities.begin(), utilities.end());
  const double min_u = *lo;
  const double range = *hi - min_u;
  if (!(range > 0.0)) throw std::domain_error("degenerate utilities");
  std::vector<double> out(utilities.size());
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    out[i] = 1.0 + 4.0 * (utilities[i] - min_u) / range;
  }
  return out;
}

MeanTable ratings_mean_table(const MeanTable& utilities) {
  MeanTable out;
  out.reserve(utilities.size());
  for (const auto& row : utilities) out.push_back(ratings_means(row));
  return out;
}

RescaledMeans rescale_instance(std::span<const double> rating_means,
                               double min_interval, Rng& rng) {
  if (!(min_interval > 0.0 && min_interval < 4.0)) {
    throw std::domain_error("min_interval must lie in (0, 4)");
  }
  RescaledMeans out;
  out.low = uniform(rng, 1.0, 5.0 - min_interval);
  out.high = uniform(rng, out.low + min_interval, 5.0);
  out.means.resize(rating_means.size());
  const double slope = (out.high - out.low) / 4.0;
  for (std::size_t i = 0; i < rating_means.size(); ++i) {
    out.means[i] = out.low + slope * (rating_means[i] - 1.0);
  }
  return out;
}

BanditInstance make_ratings_instance(const MeanTable& rating_means, State z,
                                     const RatingsConfig& config, Rng& rng) {
  if (z < 0 || z >= static_cast<State>(rating_means.size())) {
    throw std::domain_error("latent state out of range");
  }
  BanditInstance inst;
  inst.latent_state = z;
  inst.noise_std = config.effective_noise_std();
  if (config.varied_scale) {
    inst.means = rescale_instance(rating_means[z], config.min_interval, rng).means;
  } else {
    inst.means = rating_means[z];
  }
  return inst;
}

std::vector<Arm> active_action_set(int num_arms, int size,
                                   std::span<const int> genres, Rng& rng) {
  if (size > num_arms) {
    throw std::domain_error("active set larger than the arm count");
  }
  if (size < 0) throw std::domain_error("active set size must be >= 0");
  if (!genres.empty() && static_cast<int>(genres.size()) != num_arms) {
    throw std::domain_error("genre labels must cover every arm");
  }
  std::vector<Arm> chosen;
  chosen.reserve(size);
  if (size == num_arms) {
    chosen.resize(num_arms);
    std::iota(chosen.begin(), chosen.end(), 0);
    return chosen;
  }
  if (genres.empty()) {
    std::vector<Arm> all(num_arms);
    std::iota(all.begin(), all.end(), 0);
    // Partial Fisher-Yates.
    for (int i = 0; i < size; ++i) {
      const int j = std::uniform_int_distribution<int>(i, num_arms - 1)(rng);
      std::swap(all[i], all[j]);
    }
    chosen.assign(all.begin(), all.begin() + size);
  } else {
    std::map<int, std::vector<Arm>> pools;
    for (Arm a = 0; a < num_arms; ++a) pools[genres[a]].push_back(a);
    while (static_cast<int>(chosen.size()) < size) {
      for (auto& [genre, pool] : pools) {
        if (static_cast<int>(chosen.size()) == size) break;
        if (pool.empty()) continue;
        const auto i = std::uniform_int_distribution<std::size_t>(
            0, pool.size() - 1)(rng);
        chosen.push_back(pool[i]);
        pool[i] = pool.back();
        pool.pop_back();
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

nlohmann::json instance_to_json(const BanditInstance& instance) {
  return {{"state", instance.latent_state},
          {"means", instance.means},
          {"noise_std", instance.noise_std}};
}

BanditInstance instance_from_json(const nlohmann::json& doc) {
  BanditInstance inst;
  inst.latent_state = doc.at("state").get<State>();
  inst.means = doc.at("means").get<std::vector<double>>();
  inst.noise_std = doc.at("noise_std").get<double>();
  return inst;
}

nlohmann::json synthetic_config_to_json(const SyntheticConfig& c) {
  return {{"k", c.k},
          {"m", c.m},
          {"base_level", c.base_level},
          {"gap", c.gap},
          {"gap_jitter", c.gap_jitter},
          {"varied_base", c.varied_base},
          {"scale_spread", c.scale_spread},
          {"noise_std", c.noise_std},
          {"varied_scale", c.varied_scale}};
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& doc) {
  SyntheticConfig c;
  c.k = doc.value("k", c.k);
  c.m = doc.value("m", c.m);
  c.base_level = doc.value("base_level", c.base_level);
  c.gap = doc.value("gap", c.gap);
  c.gap_jitter = doc.value("gap_jitter", c.gap_jitter);
  c.varied_base = doc.value("varied_base", c.varied_base);
  c.scale_spread = doc.value("scale_spread", c.scale_spread);
  c.noise_std = doc.value("noise_std", c.noise_std);
  c.varied_scale = doc.value("varied_scale", c.varied_scale);
  return c;
}

}  // namespace lpb
