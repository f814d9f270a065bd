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

#include "lpb/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "lpb/ratings_data.h"

namespace lpb {
namespace {

std::uint64_t tag(const char* name) { return hash_name(name); }

double population_std(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// Environment for one sweep value, shared read-only by its runs.
struct PreparedEnvironment {
  double sweep_value = 0.0;
  LatentPreferenceModel model;
  MeanTable oracle_means;
  std::vector<BanditInstance> instances;
  std::vector<std::pair<State, int>> keys;  // (state, instance) per instance
  double policy_noise_std = 1.0;
  RunOptions run_options;
};

SyntheticConfig apply_sweep(SyntheticConfig c, SweepVariable var,
                            double value, bool m_follows_k) {
  switch (var) {
    case SweepVariable::kNone:
      break;
    case SweepVariable::kK:
      c.k = static_cast<int>(std::lround(value));
      if (m_follows_k) c.m = c.k;
      break;
    case SweepVariable::kM:
      c.m = static_cast<int>(std::lround(value));
      break;
    case SweepVariable::kGap:
      c.gap = value;
      break;
    case SweepVariable::kSigma:
      c.noise_std = value;
      break;
  }
  return c;
}

PreparedEnvironment prepare_synthetic(const ExperimentConfig& config,
                                      int sweep_index, double value) {
  PreparedEnvironment env;
  env.sweep_value = value;
  const SyntheticConfig sc =
      apply_sweep(config.synthetic, config.sweep, value, config.m_follows_k);
  sc.validate();
  Rng model_rng(derive_seed(config.seed, {static_cast<std::uint64_t>(sweep_index),
                                          tag("model")}));
  env.model = generate_model(sc.k, sc.m, model_rng);
  env.oracle_means = expected_mean_table(env.model, sc);
  env.policy_noise_std =
      config.policy_noise_std > 0.0 ? config.policy_noise_std : sc.noise_std;
  for (State z = 0; z < sc.m; ++z) {
    for (int n = 0; n < config.instances; ++n) {
      Rng rng(derive_seed(config.seed,
                          {static_cast<std::uint64_t>(sweep_index),
                           tag("instance"), static_cast<std::uint64_t>(z),
                           static_cast<std::uint64_t>(n)}));
      env.instances.push_back(generate_instance(env.model, z, sc, rng));
      env.keys.emplace_back(z, n);
    }
  }
  return env;
}

PreparedEnvironment prepare_ratings(const ExperimentConfig& config) {
  const RatingsSetup& setup = config.ratings;
  setup.config.validate();
  PreparedEnvironment env;
  std::vector<PreferenceOrdering> orderings;
  for (const auto& u : setup.config.utilities) {
    orderings.push_back(argsort_descending(u));
  }
  env.model = LatentPreferenceModel(std::move(orderings));
  env.oracle_means = ratings_mean_table(setup.config.utilities);
  env.policy_noise_std = config.policy_noise_std > 0.0
                             ? config.policy_noise_std
                             : std::sqrt(0.5);
  env.run_options.active_set_size = setup.config.active_set_size;
  env.run_options.genres = setup.config.genres;
  const int m = env.model.num_states();
  for (int n = 0; n < config.instances; ++n) {
    Rng rng(derive_seed(config.seed, {0, tag("instance"), tag("user"),
                                      static_cast<std::uint64_t>(n)}));
    State z = 0;
    if (setup.user_states.empty()) {
      z = std::uniform_int_distribution<State>(0, m - 1)(rng);
    } else {
      z = setup.user_states.at(n);
    }
    env.instances.push_back(
        make_ratings_instance(env.oracle_means, z, setup.config, rng));
    env.keys.emplace_back(z, n);
  }
  return env;
}

void write_csv_line(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

template <typename Key>
std::vector<std::pair<Key, std::vector<const InstanceResult*>>> group_runs(
    std::span<const InstanceResult> runs) {
  std::vector<std::pair<Key, std::vector<const InstanceResult*>>> groups;
  std::map<Key, std::size_t> index;
  for (const auto& r : runs) {
    Key key{r.key.sweep_value, r.key.policy};
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back({key, {}});
    groups[it->second].second.push_back(&r);
  }
  return groups;
}

using GroupKey = std::pair<double, std::string>;

}  // namespace

// ---- Single runs ----

RunRecord run_instance(const BanditInstance& instance, Policy& policy,
                       int horizon, std::uint64_t seed,
                       const RunOptions& options) {
  const int k = instance.num_arms();
  if (policy.num_arms() != k) {
    throw std::invalid_argument("policy and environment disagree on arm count");
  }
  if (horizon < 1) throw std::domain_error("horizon must be >= 1");
  Rng reward_rng(derive_seed(seed, {tag("reward")}));
  Rng active_rng(derive_seed(seed, {tag("active")}));
  const bool restricted =
      options.active_set_size > 0 && options.active_set_size < k;

  RunRecord rec;
  rec.arms.reserve(horizon);
  rec.rewards.reserve(horizon);
  rec.instant_regret.reserve(horizon);
  rec.cum_regret.reserve(horizon);
  const double global_best = instance.optimal_mean();
  double cum = 0.0;
  std::vector<Arm> active;
  for (int t = 0; t < horizon; ++t) {
    double best = global_best;
    if (restricted) {
      active = active_action_set(k, options.active_set_size, options.genres,
                                 active_rng);
      best = -std::numeric_limits<double>::infinity();
      for (Arm a : active) best = std::max(best, instance.means[a]);
    }
    const Arm arm = policy.select_action(t, active);
    if (arm < 0 || arm >= k) throw std::logic_error("policy chose invalid arm");
    const double reward = sample_reward(instance, arm, reward_rng);
    policy.observe(arm, reward);
    const double regret = best - instance.means[arm];
    cum += regret;
    rec.arms.push_back(arm);
    rec.rewards.push_back(reward);
    rec.instant_regret.push_back(regret);
    rec.cum_regret.push_back(cum);
  }
  if (auto* lpbts = dynamic_cast<LpbtsPolicy*>(&policy)) {
    rec.active_constraints = lpbts->active_constraints();
  }
  return rec;
}

std::vector<double> standardized_ratings(std::span<const double> rewards) {
  std::vector<double> out(rewards.size(), 0.0);
  if (rewards.empty()) return out;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  const double sd = population_std(rewards, mean);
  if (!(sd > 0.0)) return out;
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    out[t] = (rewards[t] - mean) / sd;
  }
  return out;
}

// ---- Config ----

std::string to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::kNone: return "none";
    case SweepVariable::kK: return "k";
    case SweepVariable::kM: return "m";
    case SweepVariable::kGap: return "gap";
    case SweepVariable::kSigma: return "sigma";
  }
  return "none";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "none") return SweepVariable::kNone;
  if (name == "k") return SweepVariable::kK;
  if (name == "m") return SweepVariable::kM;
  if (name == "gap" || name == "delta") return SweepVariable::kGap;
  if (name == "sigma") return SweepVariable::kSigma;
  throw std::invalid_argument("unknown sweep variable '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw std::domain_error("horizon T must be >= 1");
  if (instances < 1) throw std::domain_error("instance count N must be >= 1");
  if (policies.empty()) throw std::domain_error("no policies configured");
  if (sweep != SweepVariable::kNone && sweep_values.empty()) {
    throw std::domain_error("sweep variable set without values");
  }
  if (environment == EnvironmentKind::kRatings) {
    if (sweep != SweepVariable::kNone) {
      throw std::domain_error("ratings experiments do not sweep");
    }
    if (!ratings.user_states.empty() &&
        static_cast<int>(ratings.user_states.size()) < instances) {
      throw std::domain_error("fewer user states than users");
    }
  } else {
    for (double v : sweep_values) {
      apply_sweep(synthetic, sweep, v, m_follows_k).validate();
    }
    synthetic.validate();
  }
  if (policy_noise_std < 0.0) throw std::domain_error("policy noise < 0");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc = {
      {"environment",
       c.environment == EnvironmentKind::kSynthetic ? "synthetic" : "ratings"},
      {"synthetic", synthetic_config_to_json(c.synthetic)},
      {"policies", c.policies},
      {"T", c.horizon},
      {"N", c.instances},
      {"seed", c.seed},
      {"sweep", to_string(c.sweep)},
      {"sweep_values", c.sweep_values},
      {"m_follows_k", c.m_follows_k},
      {"ts_prior_mean", c.ts_prior.mean},
      {"ts_prior_variance", c.ts_prior.variance},
      {"policy_noise_std", c.policy_noise_std}};
  if (c.environment == EnvironmentKind::kRatings) {
    const auto& r = c.ratings.config;
    doc["ratings"] = {{"min_interval", r.min_interval},
                      {"noise_std", r.effective_noise_std()},
                      {"varied_scale", r.varied_scale},
                      {"active_set_size", r.active_set_size},
                      {"source", c.ratings.source}};
  }
  return doc;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig c;
  c.environment = doc.value("environment", "synthetic") == "ratings"
                      ? EnvironmentKind::kRatings
                      : EnvironmentKind::kSynthetic;
  if (doc.contains("synthetic")) {
    c.synthetic = synthetic_config_from_json(doc["synthetic"]);
  }
  c.policies = doc.value("policies", c.policies);
  c.horizon = doc.value("T", c.horizon);
  c.instances = doc.value("N", c.instances);
  c.seed = doc.value("seed", c.seed);
  c.sweep = parse_sweep_variable(doc.value("sweep", std::string("none")));
  c.sweep_values = doc.value("sweep_values", c.sweep_values);
  c.m_follows_k = doc.value("m_follows_k", c.m_follows_k);
  c.ts_prior.mean = doc.value("ts_prior_mean", c.ts_prior.mean);
  c.ts_prior.variance = doc.value("ts_prior_variance", c.ts_prior.variance);
  c.policy_noise_std = doc.value("policy_noise_std", c.policy_noise_std);
  if (doc.contains("ratings")) {
    const auto& r = doc["ratings"];
    c.ratings.config.min_interval = r.value("min_interval", 1.5);
    c.ratings.config.rating_noise_std = r.value("noise_std", std::sqrt(0.5));
    c.ratings.config.varied_scale = r.value("varied_scale", false);
    c.ratings.config.active_set_size = r.value("active_set_size", 300);
    c.ratings.source = r.value("source", nlohmann::json::object());
  }
  return c;
}

std::unique_ptr<Policy> make_policy(const std::string& name,
                                    const LatentPreferenceModel& model,
                                    const MeanTable& oracle_means,
                                    double noise_std, std::uint64_t seed,
                                    const GaussianPosterior& ts_prior,
                                    const LatentPreferenceModel* recovered) {
  if (name == "lpbts") {
    return std::make_unique<LpbtsPolicy>(model, noise_std, seed);
  }
  if (name == "lpbts-recovered") {
    if (recovered == nullptr) {
      throw std::invalid_argument("lpbts-recovered needs a recovered model");
    }
    auto p = std::make_unique<LpbtsPolicy>(*recovered, noise_std, seed);
    return p;
  }
  if (name == "mts") {
    return std::make_unique<MtsPolicy>(oracle_means, noise_std, seed);
  }
  if (name == "ts") {
    return std::make_unique<GaussianTsPolicy>(model.num_arms(), noise_std, seed,
                                              ts_prior);
  }
  if (name == "ts-subset") {
    return make_subset_ts(model, noise_std, seed, ts_prior);
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

int threads_from_env() {
  if (const char* s = std::getenv("LPB_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---- Sweeps ----

SweepResult run_sweep(const ExperimentConfig& config, int threads) {
  config.validate();
  if (threads <= 0) threads = threads_from_env();

  std::vector<double> values = config.sweep_values;
  if (config.sweep == SweepVariable::kNone || values.empty()) values = {0.0};

  std::vector<PreparedEnvironment> envs;
  for (std::size_t s = 0; s < values.size(); ++s) {
    envs.push_back(config.environment == EnvironmentKind::kSynthetic
                       ? prepare_synthetic(config, static_cast<int>(s), values[s])
                       : prepare_ratings(config));
  }
  const LatentPreferenceModel* recovered =
      config.ratings.recovered_model ? &*config.ratings.recovered_model
                                     : nullptr;

  struct Job {
    std::size_t env;
    std::size_t policy;
    std::size_t instance;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < envs.size(); ++s) {
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
      for (std::size_t i = 0; i < envs[s].instances.size(); ++i) {
        jobs.push_back({s, p, i});
      }
    }
  }

  SweepResult result;
  result.runs.resize(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      const PreparedEnvironment& env = envs[job.env];
      const std::string& name = config.policies[job.policy];
      const auto [z, n] = env.keys[job.instance];
      InstanceResult& out = result.runs[j];
      out.key = {static_cast<int>(job.env), env.sweep_value, name, z, n};
      try {
        const std::uint64_t coords[] = {static_cast<std::uint64_t>(job.env),
                                        hash_name(name),
                                        static_cast<std::uint64_t>(z),
                                        static_cast<std::uint64_t>(n)};
        const std::uint64_t policy_seed = derive_seed(
            config.seed, {coords[0], coords[1], tag("policy"), coords[2],
                          coords[3]});
        const std::uint64_t env_seed = derive_seed(
            config.seed, {coords[0], coords[1], tag("env"), coords[2],
                          coords[3]});
        auto policy = make_policy(name, env.model, env.oracle_means,
                                  env.policy_noise_std, policy_seed,
                                  config.ts_prior, recovered);
        out.record = run_instance(env.instances[job.instance], *policy,
                                  config.horizon, env_seed, env.run_options);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (errors[j].empty()) continue;
    const auto& k = result.runs[j].key;
    throw std::runtime_error("run failed (sweep_value=" +
                             format_double(k.sweep_value) + ", policy=" +
                             k.policy + ", state=" + std::to_string(k.state) +
                             ", instance=" + std::to_string(k.instance) +
                             "): " + errors[j]);
  }

  nlohmann::json models = nlohmann::json::array();
  for (const auto& env : envs) {
    result.models.push_back(env.model);
    models.push_back({{"sweep_value", env.sweep_value},
                      {"model", model_to_json(env.model)}});
  }
  result.manifest = {
      {"version", kVersion},
      {"config", config_to_json(config)},
      {"seeds",
       {{"base", config.seed},
        {"derivation",
         "splitmix64 chain over (base, sweep_index, name_hash, state, "
         "instance)"}}},
      {"models", models}};
  return result;
}

// ---- Aggregation ----

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::vector<RegretSummaryRow> summarize_regret(
    std::span<const InstanceResult> runs) {
  std::vector<RegretSummaryRow> rows;
  for (const auto& [key, group] : group_runs<GroupKey>(runs)) {
    const int horizon = group.front()->record.horizon();
    std::vector<double> column(group.size());
    for (int t = 0; t < horizon; ++t) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        column[i] = group[i]->record.cum_regret.at(t);
      }
      const auto [mean, sd] = mean_and_std(column);
      rows.push_back({key.first, key.second, t + 1, mean, sd});
    }
  }
  return rows;
}

std::vector<FinalSummaryRow> summarize_final(
    std::span<const InstanceResult> runs) {
  std::vector<FinalSummaryRow> rows;
  for (const auto& [key, group] : group_runs<GroupKey>(runs)) {
    std::vector<double> cum, avg, active;
    for (const auto* r : group) {
      cum.push_back(r->record.final_cum_regret());
      avg.push_back(r->record.final_avg_regret());
      if (r->record.active_constraints) {
        active.push_back(*r->record.active_constraints);
      }
    }
    FinalSummaryRow row{};
    row.sweep_value = key.first;
    row.policy = key.second;
    row.count = static_cast<int>(group.size());
    std::tie(row.mean_final_cum_regret, row.std_final_cum_regret) =
        mean_and_std(cum);
    std::tie(row.mean_final_avg_regret, row.std_final_avg_regret) =
        mean_and_std(avg);
    row.has_active_constraints = active.size() == group.size();
    if (row.has_active_constraints) {
      std::tie(row.mean_active_constraints, row.std_active_constraints) =
          mean_and_std(active);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RatingsSummaryRow> summarize_standardized(
    std::span<const InstanceResult> runs) {
  std::vector<RatingsSummaryRow> rows;
  for (const auto& [key, group] : group_runs<GroupKey>(runs)) {
    std::vector<std::vector<double>> curves;
    for (const auto* r : group) {
      curves.push_back(standardized_ratings(r->record.rewards));
    }
    const int horizon = group.front()->record.horizon();
    std::vector<double> column(group.size());
    for (int t = 0; t < horizon; ++t) {
      for (std::size_t i = 0; i < curves.size(); ++i) column[i] = curves[i][t];
      const auto [mean, sd] = mean_and_std(column);
      rows.push_back({key.first, key.second, t + 1, mean,
                      sd / std::sqrt(static_cast<double>(column.size()))});
    }
  }
  return rows;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

// ---- Files ----

namespace {

void write_summaries(std::span<const InstanceResult> runs,
                     const std::filesystem::path& dir, bool ratings_summary) {
  {
    auto out = open_out(dir / "summary.csv");
    out << "sweep_value,policy,round,mean_cum_regret,std_cum_regret\n";
    for (const auto& r : summarize_regret(runs)) {
      write_csv_line(out, {format_double(r.sweep_value), r.policy,
                           std::to_string(r.round),
                           format_double(r.mean_cum_regret),
                           format_double(r.std_cum_regret)});
    }
  }
  const auto finals = summarize_final(runs);
  {
    auto out = open_out(dir / "final_regret.csv");
    out << "sweep_value,policy,count,mean_final_cum_regret,"
           "std_final_cum_regret,mean_final_avg_regret,std_final_avg_regret\n";
    for (const auto& r : finals) {
      write_csv_line(out, {format_double(r.sweep_value), r.policy,
                           std::to_string(r.count),
                           format_double(r.mean_final_cum_regret),
                           format_double(r.std_final_cum_regret),
                           format_double(r.mean_final_avg_regret),
                           format_double(r.std_final_avg_regret)});
    }
  }
  {
    auto out = open_out(dir / "active_constraints.csv");
    out << "sweep_value,policy,count,mean_active_constraints,"
           "std_active_constraints\n";
    for (const auto& r : finals) {
      if (!r.has_active_constraints) continue;
      write_csv_line(out, {format_double(r.sweep_value), r.policy,
                           std::to_string(r.count),
                           format_double(r.mean_active_constraints),
                           format_double(r.std_active_constraints)});
    }
  }
  if (ratings_summary) {
    auto out = open_out(dir / "ratings_summary.csv");
    out << "sweep_value,policy,round,mean_standardized_reward,"
           "sem_standardized_reward\n";
    for (const auto& r : summarize_standardized(runs)) {
      write_csv_line(out, {format_double(r.sweep_value), r.policy,
                           std::to_string(r.round),
                           format_double(r.mean_standardized_reward),
                           format_double(r.sem_standardized_reward)});
    }
  }
}

}  // namespace

void write_outputs(const SweepResult& result, const std::string& dir,
                   const OutputOptions& options) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  if (options.write_runs) {
    auto out = open_out(root / "runs.csv");
    out << "sweep_value,policy,state,instance,round,arm,reward,"
           "instant_regret,cum_regret\n";
    for (const auto& r : result.runs) {
      const std::string sv = format_double(r.key.sweep_value);
      const std::string z = std::to_string(r.key.state);
      const std::string n = std::to_string(r.key.instance);
      for (int t = 0; t < r.record.horizon(); ++t) {
        write_csv_line(out, {sv, r.key.policy, z, n, std::to_string(t + 1),
                             std::to_string(r.record.arms[t]),
                             format_double(r.record.rewards[t]),
                             format_double(r.record.instant_regret[t]),
                             format_double(r.record.cum_regret[t])});
      }
    }
  }
  {
    auto out = open_out(root / "instances.csv");
    out << "sweep_value,policy,state,instance,final_cum_regret,"
           "final_avg_regret,active_constraints\n";
    for (const auto& r : result.runs) {
      write_csv_line(
          out, {format_double(r.key.sweep_value), r.key.policy,
                std::to_string(r.key.state), std::to_string(r.key.instance),
                format_double(r.record.final_cum_regret()),
                format_double(r.record.final_avg_regret()),
                r.record.active_constraints
                    ? std::to_string(*r.record.active_constraints)
                    : std::string()});
    }
  }
  // Summaries use the values as written so `report` reproduces them exactly.
  std::vector<InstanceResult> persisted = result.runs;
  for (auto& r : persisted) {
    for (auto* v : {&r.record.rewards, &r.record.instant_regret,
                    &r.record.cum_regret}) {
      for (double& x : *v) x = std::stod(format_double(x));
    }
  }
  write_summaries(persisted, root, options.ratings_summary);
  auto out = open_out(root / "manifest.json");
  out << result.manifest.dump(2) << '\n';
}

std::vector<InstanceResult> read_runs(const std::string& dir) {
  const std::filesystem::path root(dir);
  std::ifstream in(root / "runs.csv");
  if (!in) throw std::runtime_error("missing runs.csv in " + dir);
  std::string line;
  std::getline(in, line);
  std::vector<InstanceResult> runs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("malformed runs.csv line");
    const double sv = std::stod(f[0]);
    const State z = std::stoi(f[2]);
    const int n = std::stoi(f[3]);
    if (runs.empty() || runs.back().key.policy != f[1] ||
        runs.back().key.sweep_value != sv || runs.back().key.state != z ||
        runs.back().key.instance != n) {
      InstanceResult r;
      r.key = {0, sv, f[1], z, n};
      runs.push_back(std::move(r));
    }
    auto& rec = runs.back().record;
    rec.arms.push_back(std::stoi(f[5]));
    rec.rewards.push_back(std::stod(f[6]));
    rec.instant_regret.push_back(std::stod(f[7]));
    rec.cum_regret.push_back(std::stod(f[8]));
  }

  std::ifstream inst(root / "instances.csv");
  if (inst) {
    std::getline(inst, line);
    std::size_t i = 0;
    while (std::getline(inst, line) && i < runs.size()) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() == 7 && !f[6].empty()) {
        runs[i].record.active_constraints = std::stoi(f[6]);
      }
      ++i;
    }
  }
  return runs;
}

void reaggregate(const std::string& dir) {
  const auto runs = read_runs(dir);
  if (runs.empty()) throw std::runtime_error("runs.csv holds no runs");
  bool ratings = false;
  std::ifstream mf(std::filesystem::path(dir) / "manifest.json");
  if (mf) {
    const auto manifest = nlohmann::json::parse(mf);
    ratings = manifest.value("config", nlohmann::json::object())
                  .value("environment", "") == "ratings";
  }
  write_summaries(runs, dir, ratings);
}

}  // namespace lpb
