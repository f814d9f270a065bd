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

#include "lpb/ratings_data.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "lpb/environments.h"

namespace lpb {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<RatingRow> read_ratings_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ratings file " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty ratings file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"userId", "movieId", "rating",
                                             "timestamp"};
  if (header != expected) {
    throw std::runtime_error(
        "ratings header must be userId,movieId,rating,timestamp");
  }
  std::vector<RatingRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw std::runtime_error("malformed ratings line " +
                               std::to_string(line_no));
    }
    rows.push_back({std::stoll(f[0]), std::stoll(f[1]), std::stod(f[2]),
                    std::stoll(f[3])});
  }
  return rows;
}

void write_ratings_csv(std::span<const RatingRow> rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "userId,movieId,rating,timestamp\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.1f", r.rating);
    out << r.user_id << ',' << r.movie_id << ',' << buf << ',' << r.timestamp
        << '\n';
  }
}

nlohmann::json RatingsDataset::id_map() const {
  return {{"movie_ids", movie_ids}, {"user_ids", user_ids}};
}

RatingsDataset build_dataset(std::span<const RatingRow> rows,
                             int min_movie_ratings, int min_user_ratings) {
  std::map<std::int64_t, int> movie_counts;
  for (const auto& r : rows) ++movie_counts[r.movie_id];
  std::map<std::int64_t, int> user_counts;
  for (const auto& r : rows) {
    if (movie_counts[r.movie_id] >= min_movie_ratings) ++user_counts[r.user_id];
  }

  RatingsDataset ds;
  std::unordered_map<std::int64_t, int> movie_index;
  std::unordered_map<std::int64_t, int> user_index;
  // Only movies rated by a surviving user become arms.
  std::map<std::int64_t, bool> movie_used;
  for (const auto& r : rows) {
    if (movie_counts[r.movie_id] >= min_movie_ratings &&
        user_counts[r.user_id] >= min_user_ratings) {
      movie_used[r.movie_id] = true;
    }
  }
  for (const auto& [id, used] : movie_used) {
    movie_index[id] = static_cast<int>(ds.movie_ids.size());
    ds.movie_ids.push_back(id);
  }
  for (const auto& [id, n] : user_counts) {
    if (n < min_user_ratings) continue;
    user_index[id] = static_cast<int>(ds.user_ids.size());
    ds.user_ids.push_back(id);
  }

  std::vector<std::map<Arm, std::pair<double, int>>> acc(ds.user_ids.size());
  for (const auto& r : rows) {
    auto u = user_index.find(r.user_id);
    auto mv = movie_index.find(r.movie_id);
    if (u == user_index.end() || mv == movie_index.end()) continue;
    auto& slot = acc[u->second][mv->second];
    slot.first += r.rating;
    slot.second += 1;
  }
  ds.user_ratings.resize(acc.size());
  for (std::size_t u = 0; u < acc.size(); ++u) {
    for (const auto& [arm, s] : acc[u]) {
      ds.user_ratings[u][arm] = s.first / s.second;
    }
  }
  return ds;
}

std::vector<int> read_movie_genres(const std::string& path,
                                   const RatingsDataset& dataset) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open movies file " + path);
  std::string line;
  std::getline(in, line);  // header
  std::map<std::int64_t, std::string> first_genre;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 3) continue;
    const std::string& genres = f.back();
    first_genre[std::stoll(f[0])] = genres.substr(0, genres.find('|'));
  }
  std::map<std::string, int> label_of;
  for (const auto& [id, g] : first_genre) label_of.emplace(g, 0);
  int next = 0;
  for (auto& [g, label] : label_of) label = next++;
  std::vector<int> labels(dataset.num_arms());
  for (int a = 0; a < dataset.num_arms(); ++a) {
    auto it = first_genre.find(dataset.movie_ids[a]);
    labels[a] = it == first_genre.end() ? next++ : label_of[it->second];
  }
  return labels;
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int n,
                                                            double fraction,
                                                            Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  const int cut = static_cast<int>(std::lround(fraction * n));
  std::vector<int> first(idx.begin(), idx.begin() + cut);
  std::vector<int> second(idx.begin() + cut, idx.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {first, second};
}

SyntheticRatings generate_synthetic_ratings(const SyntheticRatingsSpec& spec,
                                            Rng& rng) {
  if (spec.ratings_per_user > spec.num_movies || spec.num_states < 1) {
    throw std::domain_error("invalid synthetic ratings spec");
  }
  SyntheticRatings out;
  for (int z = 0; z < spec.num_states; ++z) {
    std::vector<double> u(spec.num_movies);
    for (double& x : u) x = uniform(rng, 0.0, 1.0);
    out.utilities.push_back(std::move(u));
  }
  const MeanTable means = ratings_mean_table(out.utilities);

  std::vector<int> movies(spec.num_movies);
  std::iota(movies.begin(), movies.end(), 0);
  std::int64_t clock = 1000000000;
  for (int u = 0; u < spec.num_users; ++u) {
    const int z = std::uniform_int_distribution<int>(0, spec.num_states - 1)(rng);
    out.user_states.push_back(z);
    std::shuffle(movies.begin(), movies.end(), rng);
    for (int i = 0; i < spec.ratings_per_user; ++i) {
      const int mv = movies[i];
      double r = normal(rng, means[z][mv], spec.rating_noise_std);
      r = std::clamp(std::round(r * 2.0) / 2.0, 0.5, 5.0);
      out.rows.push_back({u + 1, mv + 1, r, clock++});
    }
  }
  return out;
}

}  // namespace lpb
