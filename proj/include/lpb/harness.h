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

// Experiment runner: plays policies against seeded environment instances,
// aggregates regret and writes the CSV/JSON result files.
//
// Every random stream is derived from the base seed and the run's
// (sweep index, name, state, instance) coordinates, so results do not depend
// on how runs are scheduled across threads or which other policies run.

#ifndef LPB_HARNESS_H_
#define LPB_HARNESS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpb/algorithms.h"
#include "lpb/environments.h"
#include "lpb/model.h"

namespace lpb {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  int active_set_size = 0;  // 0 or >= k: every arm every round
  std::vector<int> genres;
};

struct RunRecord {
  std::vector<Arm> arms;
  std::vector<double> rewards;
  std::vector<double> instant_regret;  // mu* - mu_{a_t}, noise free
  std::vector<double> cum_regret;
  std::optional<int> active_constraints;  // lpbTS only, at the final round

  int horizon() const { return static_cast<int>(arms.size()); }
  double final_cum_regret() const { return cum_regret.back(); }
  double final_avg_regret() const { return cum_regret.back() / horizon(); }

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Plays `horizon` rounds. Rewards and active sets come from `seed`; the
// policy's own randomness comes from its construction seed. With an active
// set, mu* is the best mean among that round's active arms.
RunRecord run_instance(const BanditInstance& instance, Policy& policy,
                       int horizon, std::uint64_t seed,
                       const RunOptions& options = {});

// Per-run z-scores of the reward stream using the population standard
// deviation; constant streams map to zeros.
std::vector<double> standardized_ratings(std::span<const double> rewards);

enum class EnvironmentKind { kSynthetic, kRatings };
enum class SweepVariable { kNone, kK, kM, kGap, kSigma };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

struct RatingsSetup {
  RatingsConfig config;
  // Latent state per user; empty draws states uniformly from the seed.
  std::vector<State> user_states;
  // Enables the `lpbts-recovered` policy.
  std::optional<LatentPreferenceModel> recovered_model;
  nlohmann::json source;  // how the setup was built, for the manifest
};

struct ExperimentConfig {
  EnvironmentKind environment = EnvironmentKind::kSynthetic;
  SyntheticConfig synthetic;
  RatingsSetup ratings;
  std::vector<std::string> policies = {"lpbts", "mts", "ts", "ts-subset"};
  int horizon = 200;
  int instances = 50;  // per latent state; users in ratings mode
  std::uint64_t seed = 0;
  SweepVariable sweep = SweepVariable::kNone;
  std::vector<double> sweep_values;
  bool m_follows_k = false;
  GaussianPosterior ts_prior{0.0, 100.0};
  // Noise level the policies assume; 0 uses the synthetic sigma, or
  // sqrt(0.5) in ratings mode.
  double policy_noise_std = 0.0;

  void validate() const;
};

// Ratings utilities and user states are not serialized; `ratings.source`
// records where they came from.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

std::unique_ptr<Policy> make_policy(const std::string& name,
                                    const LatentPreferenceModel& model,
                                    const MeanTable& oracle_means,
                                    double noise_std, std::uint64_t seed,
                                    const GaussianPosterior& ts_prior,
                                    const LatentPreferenceModel* recovered);

struct InstanceKey {
  int sweep_index = 0;
  double sweep_value = 0.0;
  std::string policy;
  State state = 0;
  int instance = 0;
};

struct InstanceResult {
  InstanceKey key;
  RunRecord record;
};

struct SweepResult {
  // Sorted by (sweep index, policy in config order, state, instance).
  std::vector<InstanceResult> runs;
  std::vector<LatentPreferenceModel> models;  // ground truth per sweep value
  nlohmann::json manifest;
};

// Threads <= 0 uses threads_from_env().
SweepResult run_sweep(const ExperimentConfig& config, int threads = 0);

// LPB_THREADS when set and positive, else the hardware concurrency.
int threads_from_env();

struct RegretSummaryRow {
  double sweep_value;
  std::string policy;
  int round;  // 1-based
  double mean_cum_regret;
  double std_cum_regret;
};

struct FinalSummaryRow {
  double sweep_value;
  std::string policy;
  int count;
  double mean_final_cum_regret;
  double std_final_cum_regret;
  double mean_final_avg_regret;
  double std_final_avg_regret;
  bool has_active_constraints;
  double mean_active_constraints;
  double std_active_constraints;
};

struct RatingsSummaryRow {
  double sweep_value;
  std::string policy;
  int round;
  double mean_standardized_reward;
  double sem_standardized_reward;
};

// Groups by (sweep value, policy) in order of first appearance. Standard
// deviations use the n - 1 denominator (0 for a single run).
std::vector<RegretSummaryRow> summarize_regret(
    std::span<const InstanceResult> runs);
std::vector<FinalSummaryRow> summarize_final(
    std::span<const InstanceResult> runs);
std::vector<RatingsSummaryRow> summarize_standardized(
    std::span<const InstanceResult> runs);

// Mean and n - 1 standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> values);

// %.12g
std::string format_double(double value);

struct OutputOptions {
  bool write_runs = true;
  bool ratings_summary = false;
};

// runs.csv, instances.csv, summary.csv, final_regret.csv,
// active_constraints.csv, ratings_summary.csv (ratings mode) and
// manifest.json under `dir`.
void write_outputs(const SweepResult& result, const std::string& dir,
                   const OutputOptions& options);

// Rebuilds summary.csv, final_regret.csv, active_constraints.csv and (when
// the manifest is in ratings mode) ratings_summary.csv from runs.csv and
// instances.csv in `dir`.
void reaggregate(const std::string& dir);

// Reads runs.csv and instances.csv back into per-run results.
std::vector<InstanceResult> read_runs(const std::string& dir);

}  // namespace lpb

#endif  // LPB_HARNESS_H_
