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

// Command-line front end: lpb <subcommand> [flags]. Run `lpb --help`.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpb/environments.h"
#include "lpb/harness.h"
#include "lpb/model.h"
#include "lpb/random.h"
#include "lpb/ratings_data.h"
#include "lpb/recovery.h"

namespace {

using lpb::ExperimentConfig;
using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// Options bound to a scratch config. Only options that were actually given
// (on the command line or in a --config file) are copied onto the base
// config, which is either the defaults or a replayed manifest.
struct Overrides {
  ExperimentConfig parsed;
  std::vector<std::pair<CLI::Option*,
                        std::function<void(ExperimentConfig&,
                                           const ExperimentConfig&)>>>
      copies;

  template <class Get>
  CLI::Option* option(CLI::App* app, const std::string& name, Get get,
                      const std::string& help) {
    CLI::Option* opt = app->add_option(name, get(parsed), help);
    copies.emplace_back(opt, [get](ExperimentConfig& dst,
                                   const ExperimentConfig& src) {
      get(dst) = get(const_cast<ExperimentConfig&>(src));
    });
    return opt;
  }

  template <class Get>
  CLI::Option* flag(CLI::App* app, const std::string& name, Get get,
                    const std::string& help) {
    CLI::Option* opt = app->add_flag(name, get(parsed), help);
    copies.emplace_back(opt, [get](ExperimentConfig& dst,
                                   const ExperimentConfig& src) {
      get(dst) = get(const_cast<ExperimentConfig&>(src));
    });
    return opt;
  }

  void apply(ExperimentConfig& dst) const {
    for (const auto& [opt, copy] : copies) {
      if (opt->count() > 0) copy(dst, parsed);
    }
  }
};

void add_config_option(CLI::App* app) {
  app->add_option("--config", "Key-value config file (TOML); flags override it")
      ->check(CLI::ExistingFile);
}

// Fills every option of `app` that was not given on the command line from
// the `--config` file. Keys are long option names without dashes.
void apply_config_file(CLI::App* app) {
  const CLI::Option* config = app->get_option_no_throw("--config");
  if (config == nullptr || config->count() == 0) return;
  const auto path = config->as<std::string>();
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    const std::string key =
        item.parents.empty() ? item.name
                             : CLI::detail::join(item.parents, ".") + "." + item.name;
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw std::invalid_argument("unknown config key '" + key + "' in " + path);
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

struct RunFlags {
  Overrides o;
  std::string manifest;
  std::string out = "results";
  int threads = 0;
  bool no_runs = false;
  std::string sweep_name = "none";
  CLI::Option* sweep_opt = nullptr;
};

void add_common_flags(CLI::App* app, RunFlags& f) {
  add_config_option(app);
  app->add_option("--manifest", f.manifest,
                  "Replay the config of a previous manifest.json");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads (default LPB_THREADS)");
  app->add_flag("--no-runs", f.no_runs, "Skip the per-round runs.csv");
  auto& o = f.o;
  o.option(app, "--policies", [](ExperimentConfig& c) -> auto& {
    return c.policies;
  }, "Comma-separated: lpbts, mts, ts, ts-subset, lpbts-recovered")
      ->delimiter(',');
  o.option(app, "-T,--horizon", [](ExperimentConfig& c) -> auto& {
    return c.horizon;
  }, "Rounds per instance");
  o.option(app, "-N,--instances", [](ExperimentConfig& c) -> auto& {
    return c.instances;
  }, "Instances per latent state (users in ratings mode)");
  o.option(app, "--seed", [](ExperimentConfig& c) -> auto& {
    return c.seed;
  }, "Base seed");
  o.option(app, "--ts-prior-mean", [](ExperimentConfig& c) -> auto& {
    return c.ts_prior.mean;
  }, "Gaussian TS prior mean");
  o.option(app, "--ts-prior-var", [](ExperimentConfig& c) -> auto& {
    return c.ts_prior.variance;
  }, "Gaussian TS prior variance");
  o.option(app, "--policy-noise", [](ExperimentConfig& c) -> auto& {
    return c.policy_noise_std;
  }, "Noise std the policies assume (0: environment's)");
}

void add_synthetic_flags(CLI::App* app, RunFlags& f) {
  auto& o = f.o;
  o.option(app, "-k,--arms", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.k;
  }, "Number of arms");
  o.option(app, "-m,--states", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.m;
  }, "Number of latent states");
  o.option(app, "--base-level", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.base_level;
  }, "Top-arm base level (same scale)");
  o.option(app, "--gap", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.gap;
  }, "Gap between consecutive arms");
  o.option(app, "--gap-jitter", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.gap_jitter;
  }, "Uniform jitter added to each gap");
  o.option(app, "--varied-base", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.varied_base;
  }, "Top-arm base level (varied scale)");
  o.option(app, "--scale-spread", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.scale_spread;
  }, "Spread of the varied-scale top level");
  o.option(app, "--sigma", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.noise_std;
  }, "Reward noise std");
  o.flag(app, "--varied-scale", [](ExperimentConfig& c) -> auto& {
    return c.synthetic.varied_scale;
  }, "Per-instance reward scales");
}

ExperimentConfig resolve(const RunFlags& f) {
  ExperimentConfig c;
  if (!f.manifest.empty()) c = lpb::config_from_json(read_json(f.manifest)["config"]);
  f.o.apply(c);
  return c;
}

void run_and_write(const ExperimentConfig& config, const RunFlags& f,
                   bool ratings) {
  const auto result = lpb::run_sweep(config, f.threads);
  lpb::write_outputs(result, f.out, {.write_runs = !f.no_runs,
                                     .ratings_summary = ratings});
  const auto finals = lpb::summarize_final(result.runs);
  std::printf("%-12s %-16s %8s %14s %14s\n", "sweep_value", "policy", "runs",
              "final_regret", "std");
  for (const auto& row : finals) {
    std::printf("%-12s %-16s %8d %14.4f %14.4f\n",
                lpb::format_double(row.sweep_value).c_str(), row.policy.c_str(),
                row.count, row.mean_final_cum_regret, row.std_final_cum_regret);
  }
  std::printf("wrote %s\n", f.out.c_str());
}

// ---- ratings-run ----

struct RatingsFlags {
  std::string beta;
  std::string ratings_csv;
  std::string movies_csv;
  std::string policy_model;
  int min_movie = 200;
  int min_user = 200;
  int m = 5;
  double train_fraction = 0.5;
  double offline_fraction = 0.5;
  int offline_users = 0;  // beta mode only
  int offline_min_pulls = 200;
  int offline_max_pulls = 300;
  double min_interval = 1.5;
  double rating_noise = -1.0;  // < 0: default for the scale mode
  bool varied_scale = false;
  int active_set = 300;

  json to_json() const {
    return {{"beta", beta},
            {"ratings_csv", ratings_csv},
            {"movies_csv", movies_csv},
            {"policy_model", policy_model},
            {"min_movie_ratings", min_movie},
            {"min_user_ratings", min_user},
            {"m", m},
            {"train_fraction", train_fraction},
            {"offline_fraction", offline_fraction},
            {"offline_users", offline_users},
            {"offline_min_pulls", offline_min_pulls},
            {"offline_max_pulls", offline_max_pulls},
            {"min_interval", min_interval},
            {"rating_noise", rating_noise},
            {"varied_scale", varied_scale},
            {"active_set", active_set}};
  }
};

struct RatingsOptions {
  RatingsFlags values;
  std::vector<std::pair<CLI::Option*, std::function<void(RatingsFlags&)>>>
      copies;
  template <class T>
  void add(CLI::App* app, const std::string& name, T RatingsFlags::*field,
           const std::string& help) {
    CLI::Option* opt;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app->add_flag(name, values.*field, help);
    } else {
      opt = app->add_option(name, values.*field, help);
    }
    copies.emplace_back(opt, [this, field](RatingsFlags& dst) {
      dst.*field = values.*field;
    });
  }
};

RatingsFlags ratings_flags_from_json(const json& j) {
  RatingsFlags r;
  r.beta = j.value("beta", r.beta);
  r.ratings_csv = j.value("ratings_csv", r.ratings_csv);
  r.movies_csv = j.value("movies_csv", r.movies_csv);
  r.policy_model = j.value("policy_model", r.policy_model);
  r.min_movie = j.value("min_movie_ratings", r.min_movie);
  r.min_user = j.value("min_user_ratings", r.min_user);
  r.m = j.value("m", r.m);
  r.train_fraction = j.value("train_fraction", r.train_fraction);
  r.offline_fraction = j.value("offline_fraction", r.offline_fraction);
  r.offline_users = j.value("offline_users", r.offline_users);
  r.offline_min_pulls = j.value("offline_min_pulls", r.offline_min_pulls);
  r.offline_max_pulls = j.value("offline_max_pulls", r.offline_max_pulls);
  r.min_interval = j.value("min_interval", r.min_interval);
  r.rating_noise = j.value("rating_noise", r.rating_noise);
  r.varied_scale = j.value("varied_scale", r.varied_scale);
  r.active_set = j.value("active_set", r.active_set);
  return r;
}

// Uniform rating logs for users in `states`, drawn from the environment.
std::vector<lpb::PartialRewards> simulate_offline_logs(
    const lpb::MeanTable& means, std::span<const lpb::State> states,
    const lpb::RatingsConfig& config, const RatingsFlags& r,
    std::uint64_t seed) {
  lpb::Rng rng(seed);
  std::vector<lpb::PartialRewards> logs;
  for (lpb::State z : states) {
    const auto inst = lpb::make_ratings_instance(means, z, config, rng);
    const int pulls = std::uniform_int_distribution<int>(
        r.offline_min_pulls, r.offline_max_pulls)(rng);
    const lpb::BanditInstance one[] = {inst};
    logs.push_back(lpb::log_uniform_rewards(one, pulls, rng).front());
  }
  return logs;
}

// Builds the ratings environment. Returns extra artifacts to persist.
json build_ratings_setup(ExperimentConfig& config, const RatingsFlags& r) {
  auto& setup = config.ratings;
  setup.config.min_interval = r.min_interval;
  if (r.rating_noise >= 0.0) {
    setup.config.rating_noise_std = r.rating_noise;
  } else {
    setup.config.rating_noise_std.reset();
  }
  setup.config.varied_scale = r.varied_scale;
  setup.config.active_set_size = r.active_set;
  setup.source = r.to_json();
  json artifacts = json::object();

  std::vector<lpb::State> offline_states;
  if (!r.beta.empty()) {
    const json doc = read_json(r.beta);
    setup.config.utilities = doc.at("utilities").get<lpb::MeanTable>();
    if (doc.contains("genres")) {
      setup.config.genres = doc["genres"].get<std::vector<int>>();
    }
    setup.user_states.clear();
    const int m = static_cast<int>(setup.config.utilities.size());
    for (int n = 0; n < r.offline_users; ++n) offline_states.push_back(n % m);
  } else if (!r.ratings_csv.empty()) {
    const auto rows = lpb::read_ratings_csv(r.ratings_csv);
    const auto ds = lpb::build_dataset(rows, r.min_movie, r.min_user);
    if (ds.num_users() < 4 || ds.num_arms() < 2) {
      throw std::runtime_error("too little data left after filtering");
    }
    artifacts["id_map"] = ds.id_map();
    if (!r.movies_csv.empty()) {
      setup.config.genres = lpb::read_movie_genres(r.movies_csv, ds);
    }
    lpb::Rng split_rng(lpb::derive_seed(config.seed, {lpb::hash_name("split")}));
    const auto [train, test] =
        lpb::split_indices(ds.num_users(), r.train_fraction, split_rng);
    const auto [offline, bandit] = lpb::split_indices(
        static_cast<int>(test.size()), r.offline_fraction, split_rng);

    std::vector<lpb::PartialRewards> train_data;
    for (int u : train) train_data.push_back(ds.user_ratings[u]);
    lpb::Rng rec_rng(lpb::derive_seed(config.seed, {lpb::hash_name("truth")}));
    const auto truth =
        lpb::recover_orderings(train_data, ds.num_arms(), r.m, rec_rng);
    setup.config.utilities = truth.utilities;
    artifacts["truth_report"] = truth.report();

    auto state_of = [&](int user) {
      const auto v = lpb::impute_zero(ds.user_ratings[user], ds.num_arms());
      return lpb::nearest_centroid(v, truth.clusters.centroids);
    };
    setup.user_states.clear();
    for (int i : bandit) setup.user_states.push_back(state_of(test[i]));
    if (static_cast<int>(setup.user_states.size()) < config.instances) {
      std::fprintf(stderr, "only %zu bandit users available; N reduced\n",
                   setup.user_states.size());
      config.instances = static_cast<int>(setup.user_states.size());
    }
    for (int i : offline) offline_states.push_back(state_of(test[i]));
  } else {
    throw std::invalid_argument("ratings-run needs --beta or --ratings-csv");
  }

  setup.recovered_model.reset();
  if (!r.policy_model.empty()) {
    setup.recovered_model = lpb::load_model(r.policy_model);
  } else if (!offline_states.empty()) {
    const auto means = lpb::ratings_mean_table(setup.config.utilities);
    const auto logs = simulate_offline_logs(
        means, offline_states, setup.config, r,
        lpb::derive_seed(config.seed, {lpb::hash_name("offline-logs")}));
    lpb::Rng rec_rng(lpb::derive_seed(config.seed, {lpb::hash_name("offline")}));
    const int m = static_cast<int>(setup.config.utilities.size());
    const auto rec = lpb::recover_orderings(
        logs, static_cast<int>(means.front().size()), m, rec_rng);
    setup.recovered_model = rec.model();
    artifacts["recovered_report"] = rec.report();
  }
  if (setup.recovered_model) {
    artifacts["recovered_model"] = lpb::model_to_json(*setup.recovered_model);
  }
  return artifacts;
}

// ---- recover ----

struct RecoverFlags {
  std::string ratings_csv;
  std::string truth;
  std::string out = "recovery";
  int min_movie = 200;
  int min_user = 200;
  int m = 5;
  bool synthetic = false;
  int k = 10;
  int n = 250;
  int pulls = 200;
  bool varied_scale = false;
  std::uint64_t seed = 0;
  double l2 = lpb::BtmOptions{}.l2;
};

void write_recovery(const lpb::RecoveryResult& rec,
                    const std::filesystem::path& dir, json report) {
  std::filesystem::create_directories(dir);
  write_json(dir / "model.json", lpb::model_to_json(rec.model()));
  json beta = json::array();
  for (std::size_t z = 0; z < rec.fits.size(); ++z) {
    beta.push_back({{"cluster", z},
                    {"beta", rec.fits[z].beta},
                    {"beta_sigmoid", rec.fits[z].beta_sigmoid}});
  }
  write_json(dir / "beta.json",
             {{"k", rec.utilities.front().size()},
              {"m", rec.utilities.size()},
              {"utilities", rec.utilities},
              {"clusters", beta}});
  write_json(dir / "report.json", report);
}

int run_recover(const RecoverFlags& f) {
  const std::filesystem::path dir(f.out);
  const lpb::BtmOptions btm{.l2 = f.l2};
  json report;
  double error = -1.0;
  if (f.synthetic) {
    lpb::SyntheticConfig sc;
    sc.k = f.k;
    sc.m = f.m;
    sc.varied_scale = f.varied_scale;
    const auto res = lpb::run_synthetic_recovery(sc, f.n, f.pulls, f.seed, btm);
    report = res.recovered.report();
    report["matching_error"] = res.matching_error;
    error = res.matching_error;
    write_recovery(res.recovered, dir, report);
    write_json(dir / "truth.json", lpb::model_to_json(res.truth));
  } else {
    if (f.ratings_csv.empty()) {
      throw std::invalid_argument("recover needs --ratings-csv or --synthetic");
    }
    const auto rows = lpb::read_ratings_csv(f.ratings_csv);
    const auto ds = lpb::build_dataset(rows, f.min_movie, f.min_user);
    lpb::Rng rng(lpb::derive_seed(f.seed, {lpb::hash_name("recover")}));
    const auto rec = lpb::recover_orderings(ds.user_ratings, ds.num_arms(),
                                            f.m, rng, btm);
    report = rec.report();
    report["num_users"] = ds.num_users();
    report["num_arms"] = ds.num_arms();
    if (!f.truth.empty()) {
      const auto truth = lpb::load_model(f.truth);
      error = lpb::matching_error(truth.orderings(), rec.orderings);
      report["matching_error"] = error;
    }
    write_recovery(rec, dir, report);
    write_json(dir / "id_map.json", ds.id_map());
  }
  if (error >= 0.0) std::printf("matching_error %.6f\n", error);
  std::printf("wrote %s\n", f.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent preference bandits: experiments and model recovery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lpb::kVersion);

  RunFlags synth;
  auto* synth_cmd = app.add_subcommand("synth-run", "One synthetic configuration");
  add_common_flags(synth_cmd, synth);
  add_synthetic_flags(synth_cmd, synth);

  RunFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Synthetic grid over one variable");
  add_common_flags(sweep_cmd, sweep);
  add_synthetic_flags(sweep_cmd, sweep);
  sweep.sweep_opt = sweep_cmd->add_option("--sweep-var", sweep.sweep_name,
                                          "k, m, gap or sigma");
  sweep.o.option(sweep_cmd, "--values", [](ExperimentConfig& c) -> auto& {
    return c.sweep_values;
  }, "Comma-separated sweep values")->delimiter(',');
  sweep.o.flag(sweep_cmd, "--m-follows-k", [](ExperimentConfig& c) -> auto& {
    return c.m_follows_k;
  }, "Set m = k at each k value");

  RunFlags ratings;
  RatingsOptions ropts;
  auto* ratings_cmd = app.add_subcommand("ratings-run",
                                         "Ratings environment from utilities or a ratings CSV");
  add_common_flags(ratings_cmd, ratings);
  ropts.add(ratings_cmd, "--beta", &RatingsFlags::beta,
            "Utilities JSON ({\"utilities\": [[...]], \"genres\"?})");
  ropts.add(ratings_cmd, "--ratings-csv", &RatingsFlags::ratings_csv,
            "userId,movieId,rating,timestamp file");
  ropts.add(ratings_cmd, "--movies-csv", &RatingsFlags::movies_csv,
            "movieId,title,genres file for genre-diverse action sets");
  ropts.add(ratings_cmd, "--policy-model", &RatingsFlags::policy_model,
            "Model JSON for lpbts-recovered");
  ropts.add(ratings_cmd, "--min-movie-ratings", &RatingsFlags::min_movie,
            "Ingestion filter");
  ropts.add(ratings_cmd, "--min-user-ratings", &RatingsFlags::min_user,
            "Ingestion filter");
  ropts.add(ratings_cmd, "-m,--states", &RatingsFlags::m,
            "Clusters for the ground-truth fit (CSV mode)");
  ropts.add(ratings_cmd, "--train-fraction", &RatingsFlags::train_fraction,
            "Users used for the ground-truth fit");
  ropts.add(ratings_cmd, "--offline-fraction", &RatingsFlags::offline_fraction,
            "Share of held-out users used for offline recovery");
  ropts.add(ratings_cmd, "--offline-users", &RatingsFlags::offline_users,
            "Simulated offline users for recovery (--beta mode)");
  ropts.add(ratings_cmd, "--offline-min-pulls", &RatingsFlags::offline_min_pulls,
            "Fewest logged ratings per offline user");
  ropts.add(ratings_cmd, "--offline-max-pulls", &RatingsFlags::offline_max_pulls,
            "Most logged ratings per offline user");
  ropts.add(ratings_cmd, "--min-interval", &RatingsFlags::min_interval,
            "Smallest personal rating interval");
  ropts.add(ratings_cmd, "--rating-noise", &RatingsFlags::rating_noise,
            "Rating noise std (default sqrt(0.5) same scale, 0 varied)");
  ropts.add(ratings_cmd, "--varied-scale", &RatingsFlags::varied_scale,
            "Per-user rating scales");
  ropts.add(ratings_cmd, "--active-set", &RatingsFlags::active_set,
            "Arms offered per round");

  RecoverFlags rec;
  auto* rec_cmd = app.add_subcommand("recover", "Offline ordering recovery");
  add_config_option(rec_cmd);
  rec_cmd->add_option("--ratings-csv", rec.ratings_csv, "Ratings CSV");
  rec_cmd->add_option("--truth", rec.truth, "True model JSON for scoring");
  rec_cmd->add_option("--out", rec.out, "Output directory");
  rec_cmd->add_option("--min-movie-ratings", rec.min_movie, "Ingestion filter");
  rec_cmd->add_option("--min-user-ratings", rec.min_user, "Ingestion filter");
  rec_cmd->add_option("-m,--states", rec.m, "Clusters");
  rec_cmd->add_flag("--synthetic", rec.synthetic,
                    "Recover from simulated synthetic logs");
  rec_cmd->add_option("-k,--arms", rec.k, "Arms (synthetic)");
  rec_cmd->add_option("-N,--instances", rec.n, "Logged instances (synthetic)");
  rec_cmd->add_option("--pulls", rec.pulls, "Uniform pulls per instance");
  rec_cmd->add_flag("--varied-scale", rec.varied_scale, "Varied scales (synthetic)");
  rec_cmd->add_option("--seed", rec.seed, "Seed");
  rec_cmd->add_option("--l2", rec.l2, "Bradley-Terry L2 penalty");

  int collision_k = 2;
  auto* coll_cmd = app.add_subcommand(
      "collision-prob", "Chance two distinct random orderings differ by one swap");
  coll_cmd->add_option("-k,--arms", collision_k, "Number of arms")->required();

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Re-aggregate a results directory");
  report_cmd->add_option("dir", report_dir, "Results directory")->required();

  lpb::SyntheticRatingsSpec gen_spec;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "ratings.csv";
  std::string gen_truth;
  auto* gen_cmd = app.add_subcommand("gen-ratings", "Write a synthetic ratings CSV");
  gen_cmd->add_option("--users", gen_spec.num_users, "Users");
  gen_cmd->add_option("--movies", gen_spec.num_movies, "Movies");
  gen_cmd->add_option("-m,--states", gen_spec.num_states, "Latent states");
  gen_cmd->add_option("--per-user", gen_spec.ratings_per_user, "Ratings per user");
  gen_cmd->add_option("--noise", gen_spec.rating_noise_std, "Rating noise std");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output CSV");
  gen_cmd->add_option("--truth", gen_truth, "Write the generating utilities here");

  CLI11_PARSE(app, argc, argv);

  try {
    for (CLI::App* sub : app.get_subcommands()) apply_config_file(sub);
    if (synth_cmd->parsed()) {
      ExperimentConfig c = resolve(synth);
      c.environment = lpb::EnvironmentKind::kSynthetic;
      c.sweep = lpb::SweepVariable::kNone;
      c.sweep_values.clear();
      run_and_write(c, synth, false);
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig c = resolve(sweep);
      c.environment = lpb::EnvironmentKind::kSynthetic;
      if (sweep.sweep_opt->count() > 0) {
        c.sweep = lpb::parse_sweep_variable(sweep.sweep_name);
      }
      if (c.sweep == lpb::SweepVariable::kNone) {
        throw std::invalid_argument("sweep needs --sweep-var");
      }
      run_and_write(c, sweep, false);
    } else if (ratings_cmd->parsed()) {
      ExperimentConfig c = resolve(ratings);
      c.environment = lpb::EnvironmentKind::kRatings;
      RatingsFlags r;
      if (!ratings.manifest.empty()) {
        r = ratings_flags_from_json(c.ratings.source);
      } else if (ratings_cmd->get_option("--instances")->count() == 0) {
        c.instances = 100;
      }
      for (const auto& [opt, copy] : ropts.copies) {
        if (opt->count() > 0) copy(r);
      }
      const json artifacts = build_ratings_setup(c, r);
      const bool wants_recovered =
          std::find(c.policies.begin(), c.policies.end(), "lpbts-recovered") !=
          c.policies.end();
      if (!wants_recovered && c.ratings.recovered_model &&
          ratings.manifest.empty() &&
          ratings_cmd->get_option("--policies")->count() == 0) {
        c.policies.push_back("lpbts-recovered");
      }
      const auto result = lpb::run_sweep(c, ratings.threads);
      lpb::write_outputs(result, ratings.out,
                         {.write_runs = !ratings.no_runs, .ratings_summary = true});
      const std::filesystem::path dir(ratings.out);
      for (const auto& [name, doc] : artifacts.items()) {
        write_json(dir / (name + ".json"), doc);
      }
      for (const auto& row : lpb::summarize_final(result.runs)) {
        std::printf("%-16s %6d %14.4f %14.4f\n", row.policy.c_str(), row.count,
                    row.mean_final_cum_regret, row.std_final_cum_regret);
      }
      std::printf("wrote %s\n", ratings.out.c_str());
    } else if (rec_cmd->parsed()) {
      return run_recover(rec);
    } else if (coll_cmd->parsed()) {
      const auto p = lpb::collision_probability(collision_k);
      std::cout << "k=" << collision_k << " probability=" << p.numerator << "/"
                << p.denominator << " ~ " << lpb::format_double(p.value)
                << '\n';
    } else if (report_cmd->parsed()) {
      lpb::reaggregate(report_dir);
      std::printf("re-aggregated %s\n", report_dir.c_str());
    } else if (gen_cmd->parsed()) {
      lpb::Rng rng(gen_seed);
      const auto data = lpb::generate_synthetic_ratings(gen_spec, rng);
      lpb::write_ratings_csv(data.rows, gen_out);
      if (!gen_truth.empty()) {
        write_json(gen_truth, {{"utilities", data.utilities},
                               {"user_states", data.user_states}});
      }
      std::printf("wrote %zu ratings to %s\n", data.rows.size(), gen_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
