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

// Core domain types for latent preference bandits: preference orderings over
// arms, the latent model mapping states to orderings, ground-truth bandit
// instances and the observation history a policy accumulates.
//
// Arm and state indices are 0-based everywhere.

#ifndef LPB_MODEL_H_
#define LPB_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace lpb {

using Arm = int;
using State = int;

inline constexpr double kDefaultTieTolerance = 1e-9;

// A permutation of {0, ..., k-1}, most-preferred arm first.
class PreferenceOrdering {
 public:
  PreferenceOrdering() = default;
  // Throws std::domain_error unless `order` is a permutation of [0, k).
  explicit PreferenceOrdering(std::vector<Arm> order);

  static PreferenceOrdering identity(int k);

  int size() const { return static_cast<int>(order_.size()); }
  std::span<const Arm> order() const { return order_; }
  Arm operator[](int position) const { return order_[position]; }

  // Position of `arm` in the ordering; 0 is most preferred.
  int rank_of(Arm arm) const;

  friend bool operator==(const PreferenceOrdering& a,
                         const PreferenceOrdering& b) {
    return a.order_ == b.order_;
  }

 private:
  std::vector<Arm> order_;
  std::vector<int> rank_;
};

int rank_of(const PreferenceOrdering& ordering, Arm arm);

// True iff means[o_j] >= means[o_{j+1}] - tol for every consecutive pair.
bool is_consistent(std::span<const double> means,
                   const PreferenceOrdering& ordering,
                   double tol = kDefaultTieTolerance);

Arm best_arm(const PreferenceOrdering& ordering);

// The set {(z, O_z)}. All orderings share one arm count and are pairwise
// distinct.
class LatentPreferenceModel {
 public:
  LatentPreferenceModel() = default;
  explicit LatentPreferenceModel(std::vector<PreferenceOrdering> orderings);

  int num_arms() const { return num_arms_; }
  int num_states() const { return static_cast<int>(orderings_.size()); }
  const PreferenceOrdering& ordering(State z) const { return orderings_.at(z); }
  const std::vector<PreferenceOrdering>& orderings() const {
    return orderings_;
  }

 private:
  std::vector<PreferenceOrdering> orderings_;
  int num_arms_ = 0;
};

// Ground truth for one instance: its latent state, mean vector in H_z and
// Gaussian reward noise.
struct BanditInstance {
  State latent_state = 0;
  std::vector<double> means;
  double noise_std = 1.0;

  int num_arms() const { return static_cast<int>(means.size()); }
  Arm optimal_arm() const;
  double optimal_mean() const;
  // mu* - mu_a.
  double gap(Arm arm) const;
};

// Validates that `instance.means` lies in H_z for its latent state.
void check_instance(const BanditInstance& instance,
                    const LatentPreferenceModel& model,
                    double tol = kDefaultTieTolerance);

// Stream of (arm, reward) events with per-arm sufficient statistics.
class ObservationHistory {
 public:
  struct Event {
    Arm arm;
    double reward;
  };

  explicit ObservationHistory(int num_arms = 0);

  void record(Arm arm, double reward);

  int num_arms() const { return static_cast<int>(counts_.size()); }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const std::vector<Event>& events() const { return events_; }
  int count(Arm arm) const { return counts_.at(arm); }
  double reward_sum(Arm arm) const { return sums_.at(arm); }
  std::span<const int> counts() const { return counts_; }
  // Throws std::domain_error when the arm has not been pulled.
  double empirical_mean(Arm arm) const;

 private:
  std::vector<Event> events_;
  std::vector<int> counts_;
  std::vector<double> sums_;
};

// {"k": int, "m": int, "orderings": [[int, ...], ...]}
nlohmann::json model_to_json(const LatentPreferenceModel& model);
LatentPreferenceModel model_from_json(const nlohmann::json& doc);
LatentPreferenceModel load_model(const std::string& path);
void save_model(const LatentPreferenceModel& model, const std::string& path);

}  // namespace lpb

#endif  // LPB_MODEL_H_
