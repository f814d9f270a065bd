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

// Slow, direct reference computations used to check the library. None of
// these call into the code under test beyond plain data types.

#ifndef LPB_TESTS_ORACLES_ORACLES_H_
#define LPB_TESTS_ORACLES_ORACLES_H_

#include <functional>
#include <span>
#include <vector>

#include "lpb/algorithms.h"
#include "lpb/model.h"
#include "lpb/recovery.h"

namespace lpb::oracle {

struct ChainFit {
  std::vector<double> fitted;  // indexed by arm; NaN for zero weight
  double objective = 0.0;
};

// Minimizes sum w_a (mu_a - y_a)^2 over mu non-increasing along `order` by
// enumerating every partition of the positive-weight subchain into
// contiguous level sets, keeping feasible ones.
ChainFit isotonic_by_partitions(std::span<const double> targets,
                                std::span<const double> weights,
                                std::span<const int> order);

// Minimum-cost assignment by trying every permutation.
double assignment_by_permutations(const std::vector<std::vector<double>>& cost);

// Position of `arm` found by linear scan.
int position_in(std::span<const int> order, int arm);

// Inversions counted by scanning positions directly.
int inversions_by_scan(std::span<const DuelingEvent> events,
                       std::span<const int> order);

// Kendall tau from the pair definition over item pairs.
double kendall_tau_by_pairs(std::span<const int> p, std::span<const int> q);

// Number of permutations of k items one transposition away from the
// identity, and k! - 1, by enumeration.
std::pair<long long, long long> transposition_neighbors(int k);

// Central differences of f at x.
std::vector<double> finite_difference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h);

// Bradley-Terry log-likelihood written out term by term.
double btm_loglik(const std::vector<std::vector<double>>& wins,
                  const std::vector<std::vector<double>>& exposures,
                  std::span<const double> beta, double l2);

// Golden-section maximization of a unimodal f on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo,
                  double hi, double tol = 1e-12);

// Negative Gaussian log-likelihood (up to the constant) of `events` at mu:
// sum_t (mu_{a_t}^2 - 2 r_t mu_{a_t}) / sigma^2.
double likelihood_form(std::span<const ObservationHistory::Event> events,
                       std::span<const double> mu, double sigma);

// Weighted squared error sum_a (n_a / sigma^2)(mu_a - y_a)^2 computed from
// the raw events.
double isotonic_form(std::span<const ObservationHistory::Event> events,
                     int k, std::span<const double> mu, double sigma);

// Mean and n - 1 standard deviation.
std::pair<double, double> mean_std(std::span<const double> v);

}  // namespace lpb::oracle

#endif  // LPB_TESTS_ORACLES_ORACLES_H_
