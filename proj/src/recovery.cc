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

#include "lpb/recovery.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace lpb {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

void center(std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  for (double& x : v) x -= mean;
}

double inf_norm(std::span<const double> v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

}  // namespace

// ---- ComparisonTable ----

ComparisonTable::ComparisonTable(int k)
    : k_(k), wins_(static_cast<std::size_t>(k) * k, 0.0),
      exposures_(static_cast<std::size_t>(k) * k, 0.0) {}

void ComparisonTable::add(int i, int j, double wins, double exposures) {
  if (i == j) throw std::domain_error("comparison table diagonal is zero");
  if (!(wins >= 0.0 && wins <= exposures)) {
    throw std::domain_error("wins must lie in [0, exposures]");
  }
  wins_[i * k_ + j] += wins;
  exposures_[i * k_ + j] += exposures;
}

ComparisonTable& ComparisonTable::operator+=(const ComparisonTable& other) {
  if (other.k_ != k_) throw std::domain_error("comparison table size mismatch");
  for (std::size_t i = 0; i < wins_.size(); ++i) {
    wins_[i] += other.wins_[i];
    exposures_[i] += other.exposures_[i];
  }
  return *this;
}

double ComparisonTable::total_exposures() const {
  return std::accumulate(exposures_.begin(), exposures_.end(), 0.0);
}

ComparisonTable extract_comparisons(const PartialRewards& rewards, int k) {
  ComparisonTable table(k);
  for (auto it = rewards.begin(); it != rewards.end(); ++it) {
    if (it->first < 0 || it->first >= k) {
      throw std::domain_error("reward arm out of range");
    }
    for (auto jt = std::next(it); jt != rewards.end(); ++jt) {
      const auto [i, ri] = *it;
      const auto [j, rj] = *jt;
      table.add(i, j, ri > rj ? 1.0 : 0.0, 1.0);
      table.add(j, i, rj > ri ? 1.0 : 0.0, 1.0);
    }
  }
  return table;
}

// ---- k-means ----

std::vector<double> impute_zero(const PartialRewards& rewards, int k) {
  std::vector<double> v(k, 0.0);
  for (const auto& [arm, r] : rewards) v.at(arm) = r;
  return v;
}

int nearest_centroid(std::span<const double> point,
                     const std::vector<std::vector<double>>& centroids) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

namespace {

ClusterAssignment lloyd(const std::vector<std::vector<double>>& points, int k,
                        int m, Rng& rng, int max_iter) {
  const int n = static_cast<int>(points.size());
  // k-means++ seeding.
  ClusterAssignment out;
  out.centroids.push_back(
      points[std::uniform_int_distribution<int>(0, n - 1)(rng)]);
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = squared_distance(points[i], out.centroids[0]);
  while (static_cast<int>(out.centroids.size()) < m) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    int pick = 0;
    if (total > 0.0) {
      pick = std::discrete_distribution<int>(d2.begin(), d2.end())(rng);
    } else {
      pick = std::uniform_int_distribution<int>(0, n - 1)(rng);
    }
    out.centroids.push_back(points[pick]);
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], out.centroids.back()));
    }
  }

  out.labels.assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(points[i], out.centroids);
      if (c != out.labels[i]) {
        out.labels[i] = c;
        changed = true;
      }
    }
    out.iterations = iter + 1;
    if (!changed && iter > 0) break;

    std::vector<int> sizes(m, 0);
    for (int i = 0; i < n; ++i) ++sizes[out.labels[i]];
    for (int c = 0; c < m; ++c) {
      if (sizes[c] > 0) continue;
      int far = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (sizes[out.labels[i]] < 2) continue;
        const double d = squared_distance(points[i], out.centroids[out.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[out.labels[far]];
      out.labels[far] = c;
      sizes[c] = 1;
    }

    for (auto& c : out.centroids) std::fill(c.begin(), c.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      auto& c = out.centroids[out.labels[i]];
      for (int a = 0; a < k; ++a) c[a] += points[i][a];
    }
    for (int c = 0; c < m; ++c) {
      for (double& x : out.centroids[c]) x /= sizes[c];
    }
  }

  out.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    out.inertia += squared_distance(points[i], out.centroids[out.labels[i]]);
  }
  return out;
}

}  // namespace

ClusterAssignment kmeans_zero_impute(std::span<const PartialRewards> data,
                                     int k, int m, Rng& rng, int max_iter,
                                     int restarts) {
  const int n = static_cast<int>(data.size());
  if (m < 1) throw std::domain_error("need at least one cluster");
  if (n < m) throw std::invalid_argument("fewer instances than clusters");
  if (restarts < 1) throw std::domain_error("need at least one restart");

  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (const auto& r : data) points.push_back(impute_zero(r, k));

  ClusterAssignment best;
  for (int r = 0; r < restarts; ++r) {
    ClusterAssignment trial = lloyd(points, k, m, rng, max_iter);
    if (r == 0 || trial.inertia < best.inertia) best = std::move(trial);
  }
  return best;
}

// ---- Bradley-Terry ----

double btm_objective(const ComparisonTable& table, std::span<const double> beta,
                     double l2) {
  const int k = table.size();
  double ll = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double w = table.exposures(i, j);
      if (i == j || w == 0.0) continue;
      const double y = table.wins(i, j);
      const double d = beta[i] - beta[j];
      ll += y * log_sigmoid(d) + (w - y) * log_sigmoid(-d);
    }
  }
  double sq = 0.0;
  for (double b : beta) sq += b * b;
  return ll - l2 * sq;
}

std::vector<double> btm_gradient(const ComparisonTable& table,
                                 std::span<const double> beta, double l2) {
  const int k = table.size();
  std::vector<double> g(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double w = table.exposures(i, j);
      if (i == j || w == 0.0) continue;
      const double c = table.wins(i, j) - w * sigmoid(beta[i] - beta[j]);
      g[i] += c;
      g[j] -= c;
    }
  }
  for (int i = 0; i < k; ++i) g[i] -= 2.0 * l2 * beta[i];
  return g;
}

PreferenceOrdering argsort_descending(std::span<const double> scores) {
  std::vector<Arm> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Arm a, Arm b) { return scores[a] > scores[b]; });
  return PreferenceOrdering(std::move(order));
}

BTMFit fit_btm(const ComparisonTable& table, const BtmOptions& options) {
  const int k = table.size();
  if (k == 0 || table.total_exposures() == 0.0) {
    throw std::invalid_argument("no comparisons");
  }
  const double l2 = options.l2;
  std::vector<double> beta(k, 0.0);
  BTMFit fit;
  double objective = btm_objective(table, beta, l2);

  for (int iter = 0;; ++iter) {
    std::vector<double> grad = btm_gradient(table, beta, l2);
    center(grad);  // ascent restricted to sum(beta) = 0
    fit.gradient_norm = inf_norm(grad);
    fit.iterations = iter;
    if (fit.gradient_norm <= options.tol) {
      fit.converged = true;
      break;
    }
    if (iter >= options.max_iter) break;

    // Negated Hessian plus the all-ones direction, positive definite on the
    // sum-zero subspace whenever the comparison graph is connected or l2 > 0.
    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(k, k, 1.0 / k);
    for (int i = 0; i < k; ++i) {
      a(i, i) += 2.0 * l2 + 1e-12;
      for (int j = 0; j < k; ++j) {
        const double w = table.exposures(i, j);
        if (i == j || w == 0.0) continue;
        const double p = sigmoid(beta[i] - beta[j]);
        const double h = w * p * (1.0 - p);
        a(i, i) += h;
        a(j, j) += h;
        a(i, j) -= h;
        a(j, i) -= h;
      }
    }
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(grad.data(), k);
    Eigen::VectorXd step = a.ldlt().solve(g);
    if (!step.allFinite()) step = g;
    step.array() -= step.mean();

    double t = 1.0;
    bool improved = false;
    std::vector<double> trial(k);
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < k; ++i) trial[i] = beta[i] + t * step[i];
      center(trial);
      const double obj = btm_objective(table, trial, l2);
      // Near the optimum the objective is flat to rounding; a full Newton
      // step that shrinks the gradient is then taken anyway.
      bool accept = obj >= objective;
      if (!accept && t == 1.0) {
        std::vector<double> g_trial = btm_gradient(table, trial, l2);
        center(g_trial);
        accept = obj >= objective - 1e-12 * std::max(1.0, std::abs(objective)) &&
                 inf_norm(g_trial) < fit.gradient_norm;
      }
      if (accept) {
        improved = obj > objective || t == 1.0;
        beta = trial;
        objective = obj;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {
      // No representable ascent left; report the final gradient as is.
      grad = btm_gradient(table, beta, l2);
      center(grad);
      fit.gradient_norm = inf_norm(grad);
      fit.converged = fit.gradient_norm <= options.tol;
      fit.iterations = iter + 1;
      break;
    }
  }

  fit.beta = std::move(beta);
  fit.beta_sigmoid.resize(k);
  std::transform(fit.beta.begin(), fit.beta.end(), fit.beta_sigmoid.begin(),
                 sigmoid);
  fit.ordering = argsort_descending(fit.beta_sigmoid);
  return fit;
}

// ---- Pipeline ----

LatentPreferenceModel RecoveryResult::model() const {
  std::vector<PreferenceOrdering> distinct;
  for (const auto& o : orderings) {
    if (std::find(distinct.begin(), distinct.end(), o) == distinct.end()) {
      distinct.push_back(o);
    }
  }
  return LatentPreferenceModel(std::move(distinct));
}

nlohmann::json RecoveryResult::report() const {
  std::vector<int> sizes(orderings.size(), 0);
  for (int label : clusters.labels) ++sizes[label];
  nlohmann::json clusters_json = nlohmann::json::array();
  for (std::size_t z = 0; z < orderings.size(); ++z) {
    clusters_json.push_back({{"cluster", z},
                             {"size", sizes[z]},
                             {"converged", fits[z].converged},
                             {"iterations", fits[z].iterations},
                             {"gradient_norm", fits[z].gradient_norm},
                             {"global_fallback", used_global_fallback[z] != 0}});
  }
  return {{"clusters", clusters_json},
          {"kmeans_iterations", clusters.iterations},
          {"kmeans_inertia", clusters.inertia}};
}

RecoveryResult recover_orderings(std::span<const PartialRewards> data, int k,
                                 int m, Rng& rng, const BtmOptions& options) {
  RecoveryResult out;
  out.clusters = kmeans_zero_impute(data, k, m, rng);

  std::vector<ComparisonTable> tables(m, ComparisonTable(k));
  ComparisonTable pooled(k);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const ComparisonTable t = extract_comparisons(data[n], k);
    tables[out.clusters.labels[n]] += t;
    pooled += t;
  }

  std::optional<BTMFit> global_fit;
  for (int z = 0; z < m; ++z) {
    const bool empty = tables[z].total_exposures() == 0.0;
    if (empty && !global_fit) global_fit = fit_btm(pooled, options);
    out.fits.push_back(empty ? *global_fit : fit_btm(tables[z], options));
    out.used_global_fallback.push_back(empty);
    out.orderings.push_back(out.fits.back().ordering);
    out.utilities.push_back(out.fits.back().beta_sigmoid);
  }
  return out;
}

std::vector<PartialRewards> log_uniform_rewards(
    std::span<const BanditInstance> instances, int pulls, Rng& rng) {
  std::vector<PartialRewards> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    const int k = inst.num_arms();
    std::vector<double> sums(k, 0.0);
    std::vector<int> counts(k, 0);
    for (int t = 0; t < pulls; ++t) {
      const Arm a = std::uniform_int_distribution<Arm>(0, k - 1)(rng);
      sums[a] += sample_reward(inst, a, rng);
      ++counts[a];
    }
    PartialRewards r;
    for (Arm a = 0; a < k; ++a) {
      if (counts[a] > 0) r[a] = sums[a] / counts[a];
    }
    out.push_back(std::move(r));
  }
  return out;
}

SyntheticRecovery run_synthetic_recovery(const SyntheticConfig& config,
                                         int num_instances, int pulls,
                                         std::uint64_t seed,
                                         const BtmOptions& options) {
  config.validate();
  if (num_instances < config.m) {
    throw std::invalid_argument("fewer instances than states");
  }
  SyntheticRecovery out;
  Rng model_rng(derive_seed(seed, {hash_name("model")}));
  out.truth = generate_model(config.k, config.m, model_rng);
  Rng rng(derive_seed(seed, {hash_name("instances")}));
  std::vector<BanditInstance> instances;
  for (int n = 0; n < num_instances; ++n) {
    const State z = n % config.m;
    out.states.push_back(z);
    instances.push_back(generate_instance(out.truth, z, config, rng));
  }
  const auto logged = log_uniform_rewards(instances, pulls, rng);
  Rng cluster_rng(derive_seed(seed, {hash_name("recover")}));
  out.recovered =
      recover_orderings(logged, config.k, config.m, cluster_rng, options);
  out.matching_error =
      matching_error(out.truth.orderings(), out.recovered.orderings);
  return out;
}

// ---- Evaluation ----

double kendall_tau(const PreferenceOrdering& p, const PreferenceOrdering& q) {
  const int k = p.size();
  if (q.size() != k) throw std::domain_error("orderings differ in length");
  if (k < 2) throw std::domain_error("kendall tau needs k >= 2");
  long long concordant = 0;
  long long discordant = 0;
  for (Arm i = 0; i < k; ++i) {
    for (Arm j = i + 1; j < k; ++j) {
      const int dp = p.rank_of(i) - p.rank_of(j);
      const int dq = q.rank_of(i) - q.rank_of(j);
      if ((dp < 0) == (dq < 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs = 0.5 * k * (k - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n) {
      throw std::domain_error("assignment cost matrix must be square");
    }
  }
  Assignment out;
  if (n == 0) return out;

  // 1-based potentials; column 0 is a sentinel.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = row_of_col[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  out.column_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.column_of_row[row_of_col[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost[i][out.column_of_row[i]];
  return out;
}

double matching_error(std::span<const PreferenceOrdering> truth,
                      std::span<const PreferenceOrdering> recovered) {
  if (truth.size() != recovered.size() || truth.empty()) {
    throw std::domain_error("matching needs equal, nonzero state counts");
  }
  const std::size_t m = truth.size();
  std::vector<std::vector<double>> cost(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      cost[i][j] = 1.0 - kendall_tau(truth[i], recovered[j]);
    }
  }
  return solve_assignment(cost).cost / static_cast<double>(m);
}

CollisionProbability collision_probability(int k) {
  using boost::multiprecision::cpp_int;
  if (k < 2) throw std::domain_error("collision probability needs k >= 2");
  cpp_int factorial = 1;
  for (int i = 2; i <= k; ++i) factorial *= i;
  cpp_int num = cpp_int(k) * (k - 1) / 2;
  cpp_int den = factorial - 1;
  const cpp_int g = boost::multiprecision::gcd(num, den);
  CollisionProbability out;
  out.numerator = num / g;
  out.denominator = den / g;
  out.value = static_cast<double>(
      boost::multiprecision::cpp_rational(out.numerator, out.denominator));
  return out;
}

}  // namespace lpb
