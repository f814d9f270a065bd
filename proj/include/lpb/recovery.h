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

// Offline recovery of a latent preference model from logged absolute rewards.
//
// Instances are clustered on their zero-imputed reward vectors with k-means.
// Within each cluster the pairwise outcomes of all members are pooled and a
// logistic Bradley-Terry model P(i beats j) = sigmoid(b_i - b_j) with
// sum(b) = 0 is fit by Newton ascent. Sorting sigmoid(b) in decreasing order
// gives the cluster's ordering.

#ifndef LPB_RECOVERY_H_
#define LPB_RECOVERY_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "lpb/environments.h"
#include "lpb/model.h"
#include "lpb/random.h"

namespace lpb {

// Observed (possibly averaged) rewards of one instance, keyed by arm.
using PartialRewards = std::map<Arm, double>;

// wins(i, j): times i beat j. exposures(i, j): times the pair was observed.
class ComparisonTable {
 public:
  explicit ComparisonTable(int k = 0);

  int size() const { return k_; }
  double wins(int i, int j) const { return wins_[i * k_ + j]; }
  double exposures(int i, int j) const { return exposures_[i * k_ + j]; }
  void add(int i, int j, double wins, double exposures);
  ComparisonTable& operator+=(const ComparisonTable& other);
  double total_exposures() const;

  friend bool operator==(const ComparisonTable&,
                         const ComparisonTable&) = default;

 private:
  int k_;
  std::vector<double> wins_;
  std::vector<double> exposures_;
};

// Every observed pair counts as one exposure in both directions; the strictly
// larger reward wins, ties give no win to either side.
ComparisonTable extract_comparisons(const PartialRewards& rewards, int k);

struct ClusterAssignment {
  std::vector<int> labels;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  int iterations = 0;
};

// Lloyd iterations from k-means++ seeding on vectors with missing entries set
// to zero. Stops at an assignment fixpoint or after `max_iter` rounds. An
// emptied cluster is reseeded with the point farthest from its centroid.
// Runs `restarts` independent seedings and keeps the lowest inertia.
ClusterAssignment kmeans_zero_impute(std::span<const PartialRewards> data,
                                     int k, int m, Rng& rng,
                                     int max_iter = 300, int restarts = 10);

// Zero-imputed dense copy of `rewards`.
std::vector<double> impute_zero(const PartialRewards& rewards, int k);

// Index of the closest centroid (lowest index on ties).
int nearest_centroid(std::span<const double> point,
                     const std::vector<std::vector<double>>& centroids);

struct BtmOptions {
  double l2 = 1e-4;  // penalty weight on ||b||^2
  double tol = 1e-8;
  int max_iter = 1000;
};

struct BTMFit {
  std::vector<double> beta;
  std::vector<double> beta_sigmoid;
  PreferenceOrdering ordering;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // infinity norm at exit
};

// Penalized log-likelihood summed over ordered pairs i != j, minus l2 ||b||^2.
double btm_objective(const ComparisonTable& table, std::span<const double> beta,
                     double l2);
std::vector<double> btm_gradient(const ComparisonTable& table,
                                 std::span<const double> beta, double l2);

// Throws std::invalid_argument("no comparisons") on an empty table.
BTMFit fit_btm(const ComparisonTable& table, const BtmOptions& options = {});

// Decreasing order of `scores`, ties to the lower arm index.
PreferenceOrdering argsort_descending(std::span<const double> scores);

struct RecoveryResult {
  std::vector<PreferenceOrdering> orderings;  // one per cluster
  MeanTable utilities;                        // sigmoid(b) per cluster
  ClusterAssignment clusters;
  std::vector<BTMFit> fits;
  // Clusters without comparisons; they fall back to the pooled fit.
  std::vector<bool> used_global_fallback;

  // Distinct orderings in cluster order; later duplicates are dropped.
  LatentPreferenceModel model() const;
  nlohmann::json report() const;
};

RecoveryResult recover_orderings(std::span<const PartialRewards> data, int k,
                                 int m, Rng& rng,
                                 const BtmOptions& options = {});

// Mean rewards of `pulls` uniformly random pulls per instance, keyed by arm.
std::vector<PartialRewards> log_uniform_rewards(
    std::span<const BanditInstance> instances, int pulls, Rng& rng);

struct SyntheticRecovery {
  LatentPreferenceModel truth;
  std::vector<State> states;  // per logged instance
  RecoveryResult recovered;
  double matching_error = 0.0;
};

// Draws a model and `num_instances` instances (state n mod m) from `config`,
// logs `pulls` uniform pulls per instance, recovers and scores the result.
SyntheticRecovery run_synthetic_recovery(const SyntheticConfig& config,
                                         int num_instances, int pulls,
                                         std::uint64_t seed,
                                         const BtmOptions& options = {});

// (concordant - discordant) / (k (k - 1) / 2) over item pairs, comparing the
// ranks each ordering assigns. Throws for k < 2.
double kendall_tau(const PreferenceOrdering& p, const PreferenceOrdering& q);

struct Assignment {
  std::vector<int> column_of_row;
  double cost = 0.0;
};

// Exact minimum-cost perfect matching on a square matrix (Hungarian method
// with potentials, O(n^3)).
Assignment solve_assignment(const std::vector<std::vector<double>>& cost);

// Mean of 1 - kendall_tau over the optimal matching of recovered to true
// orderings.
double matching_error(std::span<const PreferenceOrdering> truth,
                      std::span<const PreferenceOrdering> recovered);

struct CollisionProbability {
  boost::multiprecision::cpp_int numerator;
  boost::multiprecision::cpp_int denominator;
  double value = 0.0;
};

// Probability that two distinct random orderings of k arms differ by one
// transposition: C(k, 2) / (k! - 1), reduced.
CollisionProbability collision_probability(int k);

}  // namespace lpb

#endif  // LPB_RECOVERY_H_
