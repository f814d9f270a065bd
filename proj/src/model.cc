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

#include "lpb/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lpb {

PreferenceOrdering::PreferenceOrdering(std::vector<Arm> order)
    : order_(std::move(order)), rank_(order_.size(), -1) {
  const int k = size();
  if (k == 0) throw std::domain_error("ordering must contain at least one arm");
  for (int j = 0; j < k; ++j) {
    const Arm arm = order_[j];
    if (arm < 0 || arm >= k) {
      throw std::domain_error("ordering entry " + std::to_string(arm) +
                              " out of range for k=" + std::to_string(k));
    }
    if (rank_[arm] != -1) {
      throw std::domain_error("ordering repeats arm " + std::to_string(arm));
    }
    rank_[arm] = j;
  }
}

PreferenceOrdering PreferenceOrdering::identity(int k) {
  std::vector<Arm> order(k);
  std::iota(order.begin(), order.end(), 0);
  return PreferenceOrdering(std::move(order));
}

int PreferenceOrdering::rank_of(Arm arm) const {
  if (arm < 0 || arm >= size()) {
    throw std::domain_error("arm " + std::to_string(arm) + " out of range");
  }
  return rank_[arm];
}

int rank_of(const PreferenceOrdering& ordering, Arm arm) {
  return ordering.rank_of(arm);
}

bool is_consistent(std::span<const double> means,
                   const PreferenceOrdering& ordering, double tol) {
  if (static_cast<int>(means.size()) != ordering.size()) {
    throw std::domain_error("means length does not match ordering length");
  }
  for (int j = 0; j + 1 < ordering.size(); ++j) {
    // Written as a negated >= so NaN entries count as inconsistent.
    if (!(means[ordering[j]] >= means[ordering[j + 1]] - tol)) return false;
  }
  return true;
}

Arm best_arm(const PreferenceOrdering& ordering) { return ordering[0]; }

LatentPreferenceModel::LatentPreferenceModel(
    std::vector<PreferenceOrdering> orderings)
    : orderings_(std::move(orderings)) {
  if (orderings_.empty()) {
    throw std::domain_error("latent model needs at least one state");
  }
  num_arms_ = orderings_.front().size();
  if (num_arms_ == 0) throw std::domain_error("orderings must be nonempty");
  for (const auto& o : orderings_) {
    if (o.size() != num_arms_) {
      throw std::domain_error("orderings have different lengths");
    }
  }
  std::vector<std::vector<Arm>> sorted;
  sorted.reserve(orderings_.size());
  for (const auto& o : orderings_) {
    sorted.emplace_back(o.order().begin(), o.order().end());
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::domain_error("latent model contains duplicate orderings");
  }
}

Arm BanditInstance::optimal_arm() const {
  // Lowest index on ties.
  return static_cast<Arm>(std::max_element(means.begin(), means.end()) -
                          means.begin());
}

double BanditInstance::optimal_mean() const {
  return *std::max_element(means.begin(), means.end());
}

double BanditInstance::gap(Arm arm) const {
  return optimal_mean() - means.at(arm);
}

void check_instance(const BanditInstance& instance,
                    const LatentPreferenceModel& model, double tol) {
  if (instance.num_arms() != model.num_arms()) {
    throw std::domain_error("instance arm count does not match model");
  }
  if (instance.latent_state < 0 ||
      instance.latent_state >= model.num_states()) {
    throw std::domain_error("instance latent state out of range");
  }
  if (!(instance.noise_std >= 0.0)) {
    throw std::domain_error("noise_std must be nonnegative");
  }
  if (!is_consistent(instance.means, model.ordering(instance.latent_state),
                     tol)) {
    throw std::domain_error("instance means violate the state's ordering");
  }
}

ObservationHistory::ObservationHistory(int num_arms)
    : counts_(num_arms, 0), sums_(num_arms, 0.0) {}

void ObservationHistory::record(Arm arm, double reward) {
  if (arm < 0 || arm >= num_arms()) {
    throw std::domain_error("arm " + std::to_string(arm) + " out of range");
  }
  if (!std::isfinite(reward)) throw std::domain_error("non-finite reward");
  events_.push_back({arm, reward});
  counts_[arm] += 1;
  sums_[arm] += reward;
}

double ObservationHistory::empirical_mean(Arm arm) const {
  if (count(arm) == 0) {
    throw std::domain_error("empirical mean undefined for unpulled arm");
  }
  return sums_[arm] / counts_[arm];
}

nlohmann::json model_to_json(const LatentPreferenceModel& model) {
  nlohmann::json orderings = nlohmann::json::array();
  for (const auto& o : model.orderings()) {
    orderings.push_back(std::vector<Arm>(o.order().begin(), o.order().end()));
  }
  return {{"k", model.num_arms()},
          {"m", model.num_states()},
          {"orderings", orderings}};
}

LatentPreferenceModel model_from_json(const nlohmann::json& doc) {
  const int k = doc.at("k").get<int>();
  const int m = doc.at("m").get<int>();
  std::vector<PreferenceOrdering> orderings;
  for (const auto& row : doc.at("orderings")) {
    orderings.emplace_back(row.get<std::vector<Arm>>());
  }
  LatentPreferenceModel model(std::move(orderings));
  if (model.num_arms() != k || model.num_states() != m) {
    throw std::domain_error("model JSON k/m disagree with its orderings");
  }
  return model;
}

LatentPreferenceModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  return model_from_json(nlohmann::json::parse(in));
}

void save_model(const LatentPreferenceModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path);
  out << model_to_json(model).dump(2) << '\n';
}

}  // namespace lpb
