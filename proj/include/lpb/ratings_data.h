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

// Ingestion of MovieLens-shaped rating logs
// (`userId,movieId,rating,timestamp`) and a synthetic generator producing the
// same shape for tests.

#ifndef LPB_RATINGS_DATA_H_
#define LPB_RATINGS_DATA_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpb/random.h"
#include "lpb/recovery.h"

namespace lpb {

struct RatingRow {
  std::int64_t user_id;
  std::int64_t movie_id;
  double rating;
  std::int64_t timestamp;
};

std::vector<RatingRow> read_ratings_csv(const std::string& path);
void write_ratings_csv(std::span<const RatingRow> rows,
                       const std::string& path);

// Splits one CSV record honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

struct RatingsDataset {
  std::vector<std::int64_t> user_ids;   // dense user index -> original id
  std::vector<std::int64_t> movie_ids;  // dense arm index -> original id
  std::vector<PartialRewards> user_ratings;  // per dense user

  int num_arms() const { return static_cast<int>(movie_ids.size()); }
  int num_users() const { return static_cast<int>(user_ids.size()); }
  nlohmann::json id_map() const;
};

// Drops movies with fewer than `min_movie_ratings` ratings, then users with
// fewer than `min_user_ratings` among the remaining movies, and remaps the
// surviving ids to dense indices in ascending id order. Repeated ratings of
// a movie by one user are averaged.
RatingsDataset build_dataset(std::span<const RatingRow> rows,
                             int min_movie_ratings, int min_user_ratings);

// Genre label per arm from a movies CSV (`movieId,title,genres`), using the
// first pipe-separated genre. Unknown movies get their own label.
std::vector<int> read_movie_genres(const std::string& path,
                                   const RatingsDataset& dataset);

// Seeded partition of [0, n) into a leading fraction and the rest.
std::pair<std::vector<int>, std::vector<int>> split_indices(int n,
                                                            double fraction,
                                                            Rng& rng);

struct SyntheticRatingsSpec {
  int num_users = 400;
  int num_movies = 40;
  int num_states = 3;
  int ratings_per_user = 30;
  double rating_noise_std = 0.5;
};

struct SyntheticRatings {
  std::vector<RatingRow> rows;
  std::vector<int> user_states;  // by user position, ids are 1-based
  MeanTable utilities;           // [state][movie position]
};

// Users get a uniform latent state; each rates a random subset of movies with
// round-to-half ratings clamped to [0.5, 5] around the state's rating means.
SyntheticRatings generate_synthetic_ratings(const SyntheticRatingsSpec& spec,
                                            Rng& rng);

}  // namespace lpb

#endif  // LPB_RATINGS_DATA_H_
