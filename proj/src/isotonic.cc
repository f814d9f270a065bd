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
#include <limits>
#include <stdexcept>

namespace lpb {
namespace {

struct Block {
  double weighted_sum;
  double weight;
  int width;  // number of observed chain positions pooled

  double value() const { return weighted_sum / weight; }
};

}  // namespace

IsotonicFit fit_pava(std::span<const double> targets,
                     std::span<const double> weights,
                     const PreferenceOrdering& ordering,
                     const IsotonicOptions& options) {
  const int k = ordering.size();
  if (static_cast<int>(targets.size()) != k ||
      static_cast<int>(weights.size()) != k) {
    throw std::domain_error("targets/weights length must equal ordering size");
  }

  // Observed subchain, most preferred first.
  std::vector<Arm> chain;
  chain.reserve(k);
  for (int j = 0; j < k; ++j) {
    const Arm arm = ordering[j];
    const double w = weights[arm];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::domain_error("weights must be finite and nonnegative");
    }
    if (w > 0.0) {
      if (!std::isfinite(targets[arm])) {
        throw std::domain_error("target of a weighted arm is not finite");
      }
      chain.push_back(arm);
    }
  }
  if (chain.empty()) throw std::invalid_argument("no data");

  std::vector<Block> stack;
  stack.reserve(chain.size());
  for (Arm arm : chain) {
    stack.push_back({weights[arm] * targets[arm], weights[arm], 1});
    // Fitted values must be non-increasing along the chain.
    while (stack.size() >= 2 &&
           stack[stack.size() - 2].value() < stack.back().value()) {
      Block top = stack.back();
      stack.pop_back();
      Block& prev = stack.back();
      prev.weighted_sum += top.weighted_sum;
      prev.weight += top.weight;
      prev.width += top.width;
    }
  }

  IsotonicFit fit;
  fit.targets.assign(targets.begin(), targets.end());
  fit.weights.assign(weights.begin(), weights.end());
  fit.fitted.assign(k, std::numeric_limits<double>::quiet_NaN());
  std::size_t pos = 0;
  for (const Block& b : stack) {
    const double v = b.value();
    for (int i = 0; i < b.width; ++i) fit.fitted[chain[pos++]] = v;
  }

  if (options.fill_unobserved) {
    // Walk from the least-preferred end carrying the nearest observed value.
    double carry = std::numeric_limits<double>::quiet_NaN();
    for (int j = k - 1; j >= 0; --j) {
      const Arm arm = ordering[j];
      if (weights[arm] > 0.0) {
        carry = fit.fitted[arm];
      } else if (!std::isnan(carry)) {
        fit.fitted[arm] = carry;
      }
    }
    // Tail of the chain: no observed arm below, use the one above.
    const double last_observed = fit.fitted[chain.back()];
    for (int j = ordering.rank_of(chain.back()) + 1; j < k; ++j) {
      fit.fitted[ordering[j]] = last_observed;
    }
  }

  for (Arm arm : chain) {
    const double r = fit.fitted[arm] - targets[arm];
    fit.objective += weights[arm] * r * r;
  }
  fit.active_constraints =
      count_active_constraints(fit, ordering, options.tie_tolerance);
  return fit;
}

IsotonicFit constrained_mle(const ObservationHistory& history,
                            const PreferenceOrdering& ordering,
                            double noise_std, const IsotonicOptions& options) {
  if (history.empty()) {
    throw std::invalid_argument("constrained_mle needs at least one event");
  }
  if (!(noise_std > 0.0)) throw std::domain_error("noise_std must be > 0");
  const int k = history.num_arms();
  const double precision = 1.0 / (noise_std * noise_std);
  std::vector<double> targets(k, 0.0);
  std::vector<double> weights(k, 0.0);
  for (Arm a = 0; a < k; ++a) {
    const int n = history.count(a);
    if (n > 0) {
      targets[a] = history.reward_sum(a) / n;
      weights[a] = n * precision;
    }
  }
  return fit_pava(targets, weights, ordering, options);
}

int count_active_constraints(const IsotonicFit& fit,
                             const PreferenceOrdering& ordering, double tol) {
  int active = 0;
  Arm prev = -1;
  for (int j = 0; j < ordering.size(); ++j) {
    const Arm arm = ordering[j];
    if (!(fit.weights[arm] > 0.0)) continue;
    if (prev >= 0 && std::abs(fit.fitted[prev] - fit.fitted[arm]) <= tol &&
        fit.targets[prev] < fit.targets[arm]) {
      ++active;
    }
    prev = arm;
  }
  return active;
}

}  // namespace lpb
