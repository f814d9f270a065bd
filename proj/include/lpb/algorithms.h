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

// Bandit policies over a latent preference model.
//
//   lpbts      posterior sampling over latent states, scoring each state by
//              the Gaussian likelihood of its order-constrained MLE means
//   mts        posterior sampling with a known per-state mean table
//   ts         Gaussian Thompson sampling, one conjugate posterior per arm
//   ts-subset  ts restricted to arms that are optimal in some latent state
//
// Every policy owns its random engine. Given the seed and the reward stream
// the action sequence is deterministic. Argmax ties resolve to the lowest arm
// index.

#ifndef LPB_ALGORITHMS_H_
#define LPB_ALGORITHMS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lpb/isotonic.h"
#include "lpb/model.h"
#include "lpb/random.h"

namespace lpb {

using MeanTable = std::vector<std::vector<double>>;  // [state][arm]

// Per-state log-probabilities and, for lpbTS, the latest constrained fits.
struct PosteriorState {
  std::vector<double> log_probs;
  std::vector<std::vector<double>> state_estimates;

  int num_states() const { return static_cast<int>(log_probs.size()); }
};

// log P(z) = -log m for every state.
PosteriorState uniform_posterior(int num_states);

// Log-sum-exp normalization in place. Throws std::runtime_error
// ("posterior collapsed") if no entry is finite.
void normalize_log_probs(std::vector<double>& log_probs);

// Draws z with probability exp(log_probs[z]); log_probs must be normalized.
State sample_state(std::span<const double> log_probs, Rng& rng);

// First arm of `ordering` that is in `active` (all arms when empty).
Arm best_active_arm(const PreferenceOrdering& ordering,
                    std::span<const Arm> active);

// Arm for the next round of lpbTS: uniform over the active arms before any
// data, otherwise the best active arm of a state drawn from the posterior.
Arm lpbts_select(const PosteriorState& posterior,
                 const LatentPreferenceModel& model,
                 const ObservationHistory& history, Rng& rng,
                 std::span<const Arm> active = {});

// Posterior update after (arm, reward) has been appended to `history`:
// refit every state, add -(reward - mu_hat_z[arm])^2 / (2 sigma^2) and
// renormalize. Returns the summed active-constraint count of the new fits.
int lpbts_update(PosteriorState& posterior, const LatentPreferenceModel& model,
                 const ObservationHistory& history, Arm arm, double reward,
                 double noise_std, const IsotonicOptions& options = {});

Arm mts_select(std::span<const double> log_probs, const MeanTable& means,
               Rng& rng, std::span<const Arm> active = {});

void mts_update(std::vector<double>& log_probs, const MeanTable& means,
                Arm arm, double reward, double noise_std);

struct GaussianPosterior {
  double mean = 0.0;
  double variance = 100.0;
};

// Conjugate update with known noise variance.
GaussianPosterior gaussian_update(const GaussianPosterior& prior,
                                  double reward, double noise_std);

// Deduplicated best arms of all states, ascending.
std::vector<Arm> top_arm_subset(const LatentPreferenceModel& model);

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;
  virtual int num_arms() const = 0;
  // `active` restricts the choice for this round; empty means all arms.
  virtual Arm select_action(int round, std::span<const Arm> active = {}) = 0;
  virtual void observe(Arm arm, double reward) = 0;
};

class LpbtsPolicy : public Policy {
 public:
  LpbtsPolicy(LatentPreferenceModel model, double noise_std,
              std::uint64_t seed, IsotonicOptions options = {});

  std::string_view name() const override { return "lpbts"; }
  int num_arms() const override { return model_.num_arms(); }
  Arm select_action(int round, std::span<const Arm> active = {}) override;
  void observe(Arm arm, double reward) override;

  const PosteriorState& posterior() const { return posterior_; }
  const ObservationHistory& history() const { return history_; }
  // Sum over states of active constraints in the most recent fits.
  int active_constraints() const { return active_constraints_; }
  State map_state() const;

 private:
  LatentPreferenceModel model_;
  double noise_std_;
  IsotonicOptions options_;
  Rng rng_;
  PosteriorState posterior_;
  ObservationHistory history_;
  int active_constraints_ = 0;
};

class MtsPolicy : public Policy {
 public:
  MtsPolicy(MeanTable means, double noise_std, std::uint64_t seed);

  std::string_view name() const override { return "mts"; }
  int num_arms() const override;
  Arm select_action(int round, std::span<const Arm> active = {}) override;
  void observe(Arm arm, double reward) override;

  const std::vector<double>& log_probs() const { return log_probs_; }

 private:
  MeanTable means_;
  double noise_std_;
  Rng rng_;
  std::vector<double> log_probs_;
};

class GaussianTsPolicy : public Policy {
 public:
  // `allowed` limits play to a subset of arms; empty allows all.
  GaussianTsPolicy(int num_arms, double noise_std, std::uint64_t seed,
                   GaussianPosterior prior = {}, std::vector<Arm> allowed = {},
                   std::string name = "ts");

  std::string_view name() const override { return name_; }
  int num_arms() const override { return static_cast<int>(arms_.size()); }
  Arm select_action(int round, std::span<const Arm> active = {}) override;
  void observe(Arm arm, double reward) override;

  const GaussianPosterior& arm_posterior(Arm arm) const {
    return arms_.at(arm);
  }
  const std::vector<Arm>& allowed() const { return allowed_; }

 private:
  std::vector<GaussianPosterior> arms_;
  std::vector<Arm> allowed_;
  double noise_std_;
  Rng rng_;
  std::string name_;
};

// Gaussian TS over top_arm_subset(model) when it is smaller than k, and over
// every arm otherwise.
std::unique_ptr<GaussianTsPolicy> make_subset_ts(
    const LatentPreferenceModel& model, double noise_std, std::uint64_t seed,
    GaussianPosterior prior = {});

// ---- Relative feedback ----

struct DuelingEvent {
  Arm arm_a;
  Arm arm_b;
  bool preferred_a;

  DuelingEvent(Arm a, Arm b, bool a_preferred);
};

// Events whose observed direction contradicts the ordering.
int inversion_count(std::span<const DuelingEvent> events,
                    const PreferenceOrdering& ordering);

// Normalized prior[z] * 2^{-inversion_count(events, O_z)}.
std::vector<double> dueling_posterior(std::span<const DuelingEvent> events,
                                      const LatentPreferenceModel& model,
                                      std::span<const double> prior);

// Pairs events (1,2), (3,4), ...; drops a trailing odd event and pairs that
// repeat an arm. Ties resolve to preferred_a = false.
std::vector<DuelingEvent> pair_consecutive(const ObservationHistory& history);

}  // namespace lpb

#endif  // LPB_ALGORITHMS_H_
