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

#include "lpb/algorithms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace lpb {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool in_active(std::span<const Arm> active, Arm arm) {
  return active.empty() ||
         std::find(active.begin(), active.end(), arm) != active.end();
}

Arm argmax_over(std::span<const double> values, std::span<const Arm> active) {
  Arm best = -1;
  double best_value = kNegInf;
  for (Arm a = 0; a < static_cast<Arm>(values.size()); ++a) {
    if (!in_active(active, a)) continue;
    if (best < 0 || values[a] > best_value) {
      best = a;
      best_value = values[a];
    }
  }
  if (best < 0) throw std::invalid_argument("active set selects no arm");
  return best;
}

Arm uniform_active_arm(int num_arms, std::span<const Arm> active, Rng& rng) {
  if (active.empty()) {
    return std::uniform_int_distribution<Arm>(0, num_arms - 1)(rng);
  }
  const auto i = std::uniform_int_distribution<std::size_t>(
      0, active.size() - 1)(rng);
  return active[i];
}

void check_reward(double reward) {
  if (!std::isfinite(reward)) throw std::domain_error("non-finite reward");
}

}  // namespace

PosteriorState uniform_posterior(int num_states) {
  if (num_states < 1) throw std::domain_error("need at least one state");
  PosteriorState p;
  p.log_probs.assign(num_states, -std::log(static_cast<double>(num_states)));
  return p;
}

void normalize_log_probs(std::vector<double>& log_probs) {
  double max_lp = kNegInf;
  for (double lp : log_probs) {
    if (std::isnan(lp)) throw std::runtime_error("posterior collapsed");
    max_lp = std::max(max_lp, lp);
  }
  if (!std::isfinite(max_lp)) throw std::runtime_error("posterior collapsed");
  double total = 0.0;
  for (double lp : log_probs) total += std::exp(lp - max_lp);
  const double log_norm = max_lp + std::log(total);
  for (double& lp : log_probs) lp -= log_norm;
}

State sample_state(std::span<const double> log_probs, Rng& rng) {
  std::vector<double> probs(log_probs.size());
  std::transform(log_probs.begin(), log_probs.end(), probs.begin(),
                 [](double lp) { return std::exp(lp); });
  std::discrete_distribution<State> dist(probs.begin(), probs.end());
  return dist(rng);
}

Arm best_active_arm(const PreferenceOrdering& ordering,
                    std::span<const Arm> active) {
  for (Arm arm : ordering.order()) {
    if (in_active(active, arm)) return arm;
  }
  throw std::invalid_argument("active set selects no arm");
}

Arm lpbts_select(const PosteriorState& posterior,
                 const LatentPreferenceModel& model,
                 const ObservationHistory& history, Rng& rng,
                 std::span<const Arm> active) {
  if (history.empty()) {
    return uniform_active_arm(model.num_arms(), active, rng);
  }
  const State z = sample_state(posterior.log_probs, rng);
  return best_active_arm(model.ordering(z), active);
}

int lpbts_update(PosteriorState& posterior, const LatentPreferenceModel& model,
                 const ObservationHistory& history, Arm arm, double reward,
                 double noise_std, const IsotonicOptions& options) {
  check_reward(reward);
  if (history.count(arm) < 1) {
    throw std::logic_error("record the observation before updating");
  }
  const int m = model.num_states();
  const double inv_two_var = 1.0 / (2.0 * noise_std * noise_std);
  posterior.state_estimates.resize(m);
  int active = 0;
  for (State z = 0; z < m; ++z) {
    IsotonicFit fit =
        constrained_mle(history, model.ordering(z), noise_std, options);
    const double residual = reward - fit.fitted[arm];
    posterior.log_probs[z] -= residual * residual * inv_two_var;
    active += fit.active_constraints;
    posterior.state_estimates[z] = std::move(fit.fitted);
  }
  normalize_log_probs(posterior.log_probs);
  return active;
}

Arm mts_select(std::span<const double> log_probs, const MeanTable& means,
               Rng& rng, std::span<const Arm> active) {
  const State z = sample_state(log_probs, rng);
  return argmax_over(means[z], active);
}

void mts_update(std::vector<double>& log_probs, const MeanTable& means,
                Arm arm, double reward, double noise_std) {
  check_reward(reward);
  const double inv_two_var = 1.0 / (2.0 * noise_std * noise_std);
  for (std::size_t z = 0; z < log_probs.size(); ++z) {
    const double residual = reward - means[z][arm];
    log_probs[z] -= residual * residual * inv_two_var;
  }
  normalize_log_probs(log_probs);
}

GaussianPosterior gaussian_update(const GaussianPosterior& prior,
                                  double reward, double noise_std) {
  const double noise_var = noise_std * noise_std;
  GaussianPosterior post;
  post.variance = 1.0 / (1.0 / prior.variance + 1.0 / noise_var);
  post.mean =
      post.variance * (prior.mean / prior.variance + reward / noise_var);
  return post;
}

std::vector<Arm> top_arm_subset(const LatentPreferenceModel& model) {
  std::vector<Arm> arms;
  for (const auto& o : model.orderings()) arms.push_back(best_arm(o));
  std::sort(arms.begin(), arms.end());
  arms.erase(std::unique(arms.begin(), arms.end()), arms.end());
  return arms;
}

// ---- LpbtsPolicy ----

LpbtsPolicy::LpbtsPolicy(LatentPreferenceModel model, double noise_std,
                         std::uint64_t seed, IsotonicOptions options)
    : model_(std::move(model)),
      noise_std_(noise_std),
      options_(options),
      rng_(seed),
      posterior_(uniform_posterior(model_.num_states())),
      history_(model_.num_arms()) {
  if (!(noise_std_ > 0.0)) throw std::domain_error("noise_std must be > 0");
}

Arm LpbtsPolicy::select_action(int /*round*/, std::span<const Arm> active) {
  return lpbts_select(posterior_, model_, history_, rng_, active);
}

void LpbtsPolicy::observe(Arm arm, double reward) {
  check_reward(reward);
  history_.record(arm, reward);
  active_constraints_ = lpbts_update(posterior_, model_, history_, arm, reward,
                                     noise_std_, options_);
}

State LpbtsPolicy::map_state() const {
  return static_cast<State>(
      std::max_element(posterior_.log_probs.begin(),
                       posterior_.log_probs.end()) -
      posterior_.log_probs.begin());
}

// ---- MtsPolicy ----

MtsPolicy::MtsPolicy(MeanTable means, double noise_std, std::uint64_t seed)
    : means_(std::move(means)),
      noise_std_(noise_std),
      rng_(seed),
      log_probs_(uniform_posterior(static_cast<int>(means_.size())).log_probs) {
  if (!(noise_std_ > 0.0)) throw std::domain_error("noise_std must be > 0");
  for (const auto& row : means_) {
    if (row.size() != means_.front().size() || row.empty()) {
      throw std::domain_error("mean table rows must share a nonzero length");
    }
  }
}

int MtsPolicy::num_arms() const {
  return static_cast<int>(means_.front().size());
}

Arm MtsPolicy::select_action(int /*round*/, std::span<const Arm> active) {
  return mts_select(log_probs_, means_, rng_, active);
}

void MtsPolicy::observe(Arm arm, double reward) {
  mts_update(log_probs_, means_, arm, reward, noise_std_);
}

// ---- GaussianTsPolicy ----

GaussianTsPolicy::GaussianTsPolicy(int num_arms, double noise_std,
                                   std::uint64_t seed, GaussianPosterior prior,
                                   std::vector<Arm> allowed, std::string name)
    : arms_(num_arms, prior),
      allowed_(std::move(allowed)),
      noise_std_(noise_std),
      rng_(seed),
      name_(std::move(name)) {
  if (!(noise_std_ > 0.0)) throw std::domain_error("noise_std must be > 0");
  if (!(prior.variance > 0.0) || !std::isfinite(prior.mean) ||
      !std::isfinite(prior.variance)) {
    throw std::domain_error("prior must be finite with positive variance");
  }
  for (Arm a : allowed_) {
    if (a < 0 || a >= num_arms) throw std::domain_error("allowed arm range");
  }
}

Arm GaussianTsPolicy::select_action(int /*round*/,
                                    std::span<const Arm> active) {
  std::vector<Arm> candidates;
  for (Arm a = 0; a < num_arms(); ++a) {
    const bool allowed =
        allowed_.empty() ||
        std::find(allowed_.begin(), allowed_.end(), a) != allowed_.end();
    if (allowed && in_active(active, a)) candidates.push_back(a);
  }
  // No allowed arm is active this round: fall back to the active set.
  if (candidates.empty()) candidates.assign(active.begin(), active.end());
  if (candidates.empty()) throw std::invalid_argument("no arm to select");

  Arm best = -1;
  double best_draw = kNegInf;
  for (Arm a : candidates) {
    const double draw =
        normal(rng_, arms_[a].mean, std::sqrt(arms_[a].variance));
    if (best < 0 || draw > best_draw) {
      best = a;
      best_draw = draw;
    }
  }
  return best;
}

void GaussianTsPolicy::observe(Arm arm, double reward) {
  check_reward(reward);
  arms_.at(arm) = gaussian_update(arms_[arm], reward, noise_std_);
}

std::unique_ptr<GaussianTsPolicy> make_subset_ts(
    const LatentPreferenceModel& model, double noise_std, std::uint64_t seed,
    GaussianPosterior prior) {
  std::vector<Arm> subset = top_arm_subset(model);
  if (static_cast<int>(subset.size()) >= model.num_arms()) subset.clear();
  return std::make_unique<GaussianTsPolicy>(model.num_arms(), noise_std, seed,
                                            prior, std::move(subset),
                                            "ts-subset");
}

// ---- Relative feedback ----

DuelingEvent::DuelingEvent(Arm a, Arm b, bool a_preferred)
    : arm_a(a), arm_b(b), preferred_a(a_preferred) {
  if (a == b) throw std::domain_error("dueling event needs distinct arms");
}

int inversion_count(std::span<const DuelingEvent> events,
                    const PreferenceOrdering& ordering) {
  int inversions = 0;
  for (const auto& e : events) {
    const bool a_ranked_higher =
        ordering.rank_of(e.arm_a) < ordering.rank_of(e.arm_b);
    if (a_ranked_higher != e.preferred_a) ++inversions;
  }
  return inversions;
}

std::vector<double> dueling_posterior(std::span<const DuelingEvent> events,
                                      const LatentPreferenceModel& model,
                                      std::span<const double> prior) {
  const int m = model.num_states();
  if (static_cast<int>(prior.size()) != m) {
    throw std::domain_error("prior length must equal state count");
  }
  std::vector<double> log_post(m);
  for (State z = 0; z < m; ++z) {
    log_post[z] = std::log(prior[z]) -
                  inversion_count(events, model.ordering(z)) * std::log(2.0);
  }
  normalize_log_probs(log_post);
  for (double& lp : log_post) lp = std::exp(lp);
  return log_post;
}

std::vector<DuelingEvent> pair_consecutive(const ObservationHistory& history) {
  std::vector<DuelingEvent> out;
  const auto& ev = history.events();
  for (std::size_t i = 0; i + 1 < ev.size(); i += 2) {
    if (ev[i].arm == ev[i + 1].arm) continue;
    out.emplace_back(ev[i].arm, ev[i + 1].arm, ev[i].reward > ev[i + 1].reward);
  }
  return out;
}

}  // namespace lpb
