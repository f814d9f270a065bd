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

// Weighted isotonic regression along a preference ordering.
//
// Minimizes sum_a w_a (mu_a - y_a)^2 subject to mu_{o_1} >= ... >= mu_{o_k}.
// With y_a the empirical mean of arm a and w_a = n_a / sigma^2 this is the
// order-constrained Gaussian maximum-likelihood estimate of the arm means.
//
// Arms with zero weight carry no data. Their fitted value is copied from the
// nearest positive-weight arm in the less-preferred direction, or from the
// nearest one in the more-preferred direction at the tail of the chain. Any
// such completion stays inside H_z.

#ifndef LPB_ISOTONIC_H_
#define LPB_ISOTONIC_H_

#include <span>
#include <vector>

#include "lpb/model.h"

namespace lpb {

struct IsotonicFit {
  std::vector<double> fitted;   // indexed by arm
  std::vector<double> targets;  // inputs, indexed by arm
  std::vector<double> weights;  // inputs, indexed by arm
  int active_constraints = 0;
  double objective = 0.0;  // weighted squared error over positive weights
};

struct IsotonicOptions {
  // When false, zero-weight arms are left as NaN instead of being completed.
  bool fill_unobserved = true;
  double tie_tolerance = kDefaultTieTolerance;
};

// Pool-adjacent-violators with a block stack; O(k) amortized.
// Throws std::domain_error on size mismatch or a negative/non-finite weight
// and std::invalid_argument("no data") when every weight is zero.
IsotonicFit fit_pava(std::span<const double> targets,
                     std::span<const double> weights,
                     const PreferenceOrdering& ordering,
                     const IsotonicOptions& options = {});

// fit_pava(y_a, n_a / sigma^2, ordering). Throws on an empty history.
IsotonicFit constrained_mle(const ObservationHistory& history,
                            const PreferenceOrdering& ordering,
                            double noise_std,
                            const IsotonicOptions& options = {});

// Adjacent pairs of observed arms along the ordering whose fitted values are
// pooled (within tol) while their raw targets violate the ordering. Arms with
// zero weight are skipped, so the chain considered is the observed subchain.
int count_active_constraints(const IsotonicFit& fit,
                             const PreferenceOrdering& ordering,
                             double tol = kDefaultTieTolerance);

}  // namespace lpb

#endif  // LPB_ISOTONIC_H_
