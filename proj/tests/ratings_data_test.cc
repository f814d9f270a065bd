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

#include <filesystem>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "gtest/gtest.h"

namespace lpb {
namespace {

std::filesystem::path temp_file(const std::string& name,
                                const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

TEST(SplitCsvLineTest, QuotesAndEmbeddedCommas) {
  EXPECT_EQ(split_csv_line("1,\"Heat, The (1995)\",Action|Crime"),
            (std::vector<std::string>{"1", "Heat, The (1995)", "Action|Crime"}));
  EXPECT_EQ(split_csv_line("a,\"say \"\"hi\"\"\",b\r"),
            (std::vector<std::string>{"a", "say \"hi\"", "b"}));
  EXPECT_EQ(split_csv_line(""), (std::vector<std::string>{""}));
}

TEST(RatingsCsvTest, RoundTrip) {
  const std::vector<RatingRow> rows = {{1, 10, 4.5, 100}, {2, 10, 3.0, 101},
                                       {2, 7, 0.5, 102}};
  const auto path = std::filesystem::temp_directory_path() / "lpb_ratings_rt.csv";
  write_ratings_csv(rows, path.string());
  const auto back = read_ratings_csv(path.string());
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[1].user_id, 2);
  EXPECT_EQ(back[1].movie_id, 10);
  EXPECT_EQ(back[1].rating, 3.0);
  EXPECT_EQ(back[2].timestamp, 102);
  std::filesystem::remove(path);
}

TEST(RatingsCsvTest, HeaderIsChecked) {
  const auto path = temp_file("lpb_bad_header.csv", "user,movie,rating,ts\n1,2,3,4\n");
  EXPECT_THROW(read_ratings_csv(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}

TEST(RatingsCsvTest, MalformedLineReportsItsNumber) {
  const auto path = temp_file("lpb_bad_line.csv",
                              "userId,movieId,rating,timestamp\n1,2,3,4\n1,2\n");
  try {
    read_ratings_csv(path.string());
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST(RatingsCsvTest, MissingFileThrows) {
  EXPECT_THROW(read_ratings_csv("/nonexistent/lpb.csv"), std::runtime_error);
}

TEST(BuildDatasetTest, FiltersMoviesThenUsers) {
  // Movie 30 has one rating and is dropped; user 3 then has one rating left.
  const std::vector<RatingRow> rows = {
      {1, 10, 4.0, 0}, {1, 20, 3.0, 0}, {2, 10, 2.0, 0}, {2, 20, 5.0, 0},
      {3, 10, 1.0, 0}, {3, 30, 2.0, 0}, {2, 20, 4.0, 1}};
  const auto ds = build_dataset(rows, 2, 2);
  EXPECT_EQ(ds.movie_ids, (std::vector<std::int64_t>{10, 20}));
  EXPECT_EQ(ds.user_ids, (std::vector<std::int64_t>{1, 2}));
  ASSERT_EQ(ds.num_users(), 2);
  EXPECT_EQ(ds.user_ratings[0].at(0), 4.0);
  EXPECT_EQ(ds.user_ratings[1].at(1), 4.5);  // repeated rating averaged
  const auto ids = ds.id_map();
  EXPECT_EQ(ids["movie_ids"], nlohmann::json({10, 20}));
}

TEST(BuildDatasetTest, NoFilterKeepsEverything) {
  const std::vector<RatingRow> rows = {{5, 3, 1.0, 0}, {4, 9, 2.0, 0}};
  const auto ds = build_dataset(rows, 0, 0);
  EXPECT_EQ(ds.num_arms(), 2);
  EXPECT_EQ(ds.num_users(), 2);
  EXPECT_EQ(ds.user_ids.front(), 4);
}

TEST(MovieGenresTest, FirstGenreLabels) {
  const auto path = temp_file(
      "lpb_movies.csv",
      "movieId,title,genres\n10,\"Heat, The\",Action|Crime\n20,Up,Animation\n"
      "30,Rush,Action\n");
  RatingsDataset ds;
  ds.movie_ids = {10, 20, 30, 40};
  const auto labels = read_movie_genres(path.string(), ds);
  ASSERT_EQ(labels.size(), 4u);
  EXPECT_EQ(labels[0], labels[2]);
  EXPECT_NE(labels[0], labels[1]);
  EXPECT_EQ(std::set<int>(labels.begin(), labels.end()).size(), 3u);
  std::filesystem::remove(path);
}

TEST(SplitIndicesTest, PartitionAndDeterminism) {
  Rng a(4), b(4);
  const auto [x1, y1] = split_indices(11, 0.5, a);
  const auto [x2, y2] = split_indices(11, 0.5, b);
  EXPECT_EQ(x1, x2);
  EXPECT_EQ(y1, y2);
  EXPECT_EQ(x1.size(), 6u);  // lround(5.5)
  std::set<int> all(x1.begin(), x1.end());
  all.insert(y1.begin(), y1.end());
  EXPECT_EQ(all.size(), 11u);
}

TEST(SyntheticRatingsTest, ShapeAndRange) {
  SyntheticRatingsSpec spec;
  spec.num_users = 50;
  spec.num_movies = 12;
  spec.ratings_per_user = 8;
  Rng rng(3);
  const auto data = generate_synthetic_ratings(spec, rng);
  EXPECT_EQ(data.rows.size(), 400u);
  EXPECT_EQ(data.user_states.size(), 50u);
  EXPECT_EQ(data.utilities.size(), 3u);
  for (const auto& r : data.rows) {
    EXPECT_GE(r.rating, 0.5);
    EXPECT_LE(r.rating, 5.0);
    EXPECT_EQ(r.rating * 2.0, std::round(r.rating * 2.0));
  }
  spec.ratings_per_user = 13;
  EXPECT_THROW(generate_synthetic_ratings(spec, rng), std::domain_error);
}

TEST(SyntheticRatingsTest, RecoveryFindsTheGeneratingStates) {
  SyntheticRatingsSpec spec;
  spec.num_users = 300;
  spec.num_movies = 20;
  spec.num_states = 2;
  spec.ratings_per_user = 20;
  spec.rating_noise_std = 0.2;
  Rng rng(5);
  const auto data = generate_synthetic_ratings(spec, rng);
  const auto ds = build_dataset(data.rows, 0, 0);
  Rng krng(6);
  const auto rec = recover_orderings(ds.user_ratings, ds.num_arms(), 2, krng);
  std::vector<PreferenceOrdering> truth;
  for (const auto& u : data.utilities) truth.push_back(argsort_descending(u));
  EXPECT_LT(matching_error(truth, rec.orderings), 0.1);
}

}  // namespace
}  // namespace lpb
