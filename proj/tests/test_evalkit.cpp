#include "kgrec/ratings.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "kgrec/error.hpp"
#include "kgrec/metrics.hpp"
#include "kgrec/rng.hpp"
#include "kgrec/split.hpp"

#include "testutil.hpp"

using namespace kgrec;
using testutil::TempDir;
using testutil::put_file;

namespace {

bool same_ratings(const std::vector<Rating>& a, const std::vector<Rating>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].user != b[i].user || a[i].item != b[i].item ||
        a[i].value != b[i].value || a[i].timestamp != b[i].timestamp)
      return false;
  return true;
}

RatingsDataset make_dataset(std::vector<Rating> ratings) {
  RatingsDataset d;
  std::sort(ratings.begin(), ratings.end(), [](const Rating& a, const Rating& b) {
    if (a.user != b.user) return a.user < b.user;
    return a.item < b.item;
  });
  for (const Rating& r : ratings) d.items[r.item];
  d.ratings = std::move(ratings);
  return d;
}

// 102 movies (101, 102 unaligned), 4 users with planted rating counts so the
// popularity cut, the user cut and the empty-movie cut each bite a known
// amount.
RatingsDataset filter_fixture() {
  std::vector<Rating> rs;
  auto rate = [&](std::int64_t user, std::int64_t item) {
    rs.push_back({user, item, 3, 1000 + item});
  };
  for (std::int64_t m = 1; m <= 60; ++m) rate(1, m);
  rate(1, 101);
  rate(1, 102);
  for (std::int64_t m = 1; m <= 50; ++m) rate(2, m);
  for (std::int64_t m = 1; m <= 60; ++m) rate(3, m);
  for (std::int64_t m = 1; m <= 55; ++m) rate(4, m);
  RatingsDataset d = make_dataset(std::move(rs));
  for (std::int64_t m = 1; m <= 102; ++m) d.items[m];  // incl. unrated movies
  return d;
}

std::set<std::int64_t> aligned_1_to_100() {
  std::set<std::int64_t> s;
  for (std::int64_t m = 1; m <= 100; ++m) s.insert(m);
  return s;
}

}  // namespace

TEST_CASE("movielens files parse into a sorted dataset") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"),
           "1::Toy Story (1995)::Animation|Children's|Comedy\n"
           "1193::One Flew Over the Cuckoo's Nest (1975)::Drama\n");
  put_file(dir.file("ratings.dat"),
           "1::1193::5::978300760\n"
           "1::1::4::978300761\n");
  RatingsDataset d = load_movielens(dir.file("ratings.dat"), dir.file("movies.dat"));
  REQUIRE(d.ratings.size() == 2);
  CHECK(d.ratings[0].item == 1);  // sorted by (user, item)
  CHECK(d.ratings[1].user == 1);
  CHECK(d.ratings[1].item == 1193);
  CHECK(d.ratings[1].value == 5);
  CHECK(d.ratings[1].timestamp == 978300760);
  CHECK(d.items.at(1).title == "Toy Story (1995)");
  CHECK(d.items.at(1).genres ==
        std::set<std::string>{"Animation", "Children's", "Comedy"});
  CHECK(d.items.at(1193).genres == std::set<std::string>{"Drama"});
  CHECK(d.user_count() == 1);
}

TEST_CASE("ratings outside the 1..5 scale are rejected") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n");
  put_file(dir.file("ratings.dat"), "1::1::6::100\n");
  CHECK_THROWS_AS(load_movielens(dir.file("ratings.dat"), dir.file("movies.dat")),
                  ParseError);
}

TEST_CASE("duplicate user-item pairs are rejected") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n");
  put_file(dir.file("ratings.dat"), "1::1::4::100\n1::1::5::200\n");
  CHECK_THROWS_AS(load_movielens(dir.file("ratings.dat"), dir.file("movies.dat")),
                  ParseError);
}

TEST_CASE("a rating of an unlisted movie is rejected") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n");
  put_file(dir.file("ratings.dat"), "1::2::4::100\n");
  CHECK_THROWS_AS(load_movielens(dir.file("ratings.dat"), dir.file("movies.dat")),
                  ParseError);
}

TEST_CASE("malformed rows report their line number") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n");
  put_file(dir.file("ratings.dat"), "1::1::4::100\n1::1::4\n");
  try {
    load_movielens(dir.file("ratings.dat"), dir.file("movies.dat"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("duplicate movie ids are rejected") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n1::B::Comedy\n");
  put_file(dir.file("ratings.dat"), "");
  CHECK_THROWS_AS(load_movielens(dir.file("ratings.dat"), dir.file("movies.dat")),
                  ParseError);
}

TEST_CASE("country rows attach to their items") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n2::B::Comedy\n");
  put_file(dir.file("ratings.dat"), "1::1::4::100\n");
  RatingsDataset d = load_movielens(dir.file("ratings.dat"), dir.file("movies.dat"));
  put_file(dir.file("countries.tsv"), "item_id\tcountry\n1\tUSA\n1\tUK\n2\tUSA\n");
  attach_countries(d, dir.file("countries.tsv"));
  CHECK(d.items.at(1).countries == std::set<std::string>{"UK", "USA"});
  CHECK(d.items.at(2).countries == std::set<std::string>{"USA"});
}

TEST_CASE("country table requires its header and known items") {
  TempDir dir("ml");
  put_file(dir.file("movies.dat"), "1::A::Drama\n");
  put_file(dir.file("ratings.dat"), "1::1::4::100\n");
  RatingsDataset d = load_movielens(dir.file("ratings.dat"), dir.file("movies.dat"));

  put_file(dir.file("no_header.tsv"), "1\tUSA\n");
  CHECK_THROWS_AS(attach_countries(d, dir.file("no_header.tsv")), ParseError);

  put_file(dir.file("unknown.tsv"), "item_id\tcountry\n9\tUSA\n");
  CHECK_THROWS_AS(attach_countries(d, dir.file("unknown.tsv")), ParseError);

  put_file(dir.file("cols.tsv"), "item_id\tcountry\n1\tUSA\textra\n");
  CHECK_THROWS_AS(attach_countries(d, dir.file("cols.tsv")), ParseError);
}

TEST_CASE("filter pipeline stage counts match the planted fixture") {
  RatingsDataset d = filter_fixture();
  FilterParams p{0.01, 50};
  FilterOutcome out = apply_filters(d, aligned_1_to_100(), p);

  REQUIRE(out.stages.size() == 5);
  auto expect = [&](int i, const char* stage, std::size_t movies,
                    std::size_t users, std::size_t ratings) {
    CHECK(out.stages[i].stage == stage);
    CHECK(out.stages[i].movies == movies);
    CHECK(out.stages[i].users == users);
    CHECK(out.stages[i].ratings == ratings);
  };
  expect(0, "input", 102, 4, 227);
  expect(1, "aligned", 100, 4, 225);
  // ceil(0.01 * 100) = 1 movie; movies 1..50 tie at 4 ratings, ties break by
  // ascending id so exactly movie 1 goes
  expect(2, "popularity", 99, 4, 221);
  // user 2 drops from 50 to 49 ratings when movie 1 goes
  expect(3, "min-user-ratings", 99, 3, 172);
  // movies 61..100 never had ratings
  expect(4, "nonzero-movies", 59, 3, 172);

  CHECK_FALSE(out.dataset.items.count(1));
  CHECK(out.dataset.items.count(2));
  auto users = out.dataset.user_ids();
  CHECK(users == std::set<std::int64_t>{1, 3, 4});
}

TEST_CASE("filter stage counts never increase") {
  RatingsDataset d = filter_fixture();
  FilterOutcome out = apply_filters(d, aligned_1_to_100(), {0.01, 50});
  for (std::size_t i = 1; i < out.stages.size(); ++i) {
    CHECK(out.stages[i].movies <= out.stages[i - 1].movies);
    CHECK(out.stages[i].users <= out.stages[i - 1].users);
    CHECK(out.stages[i].ratings <= out.stages[i - 1].ratings);
  }
}

TEST_CASE("filtering an already filtered dataset changes nothing") {
  RatingsDataset d = filter_fixture();
  FilterParams p{0.01, 50};
  FilterOutcome first = apply_filters(d, aligned_1_to_100(), p);
  FilterOutcome second = apply_filters(first.dataset, aligned_1_to_100(), p);
  CHECK(same_ratings(second.dataset.ratings, first.dataset.ratings));
  CHECK(second.dataset.items.size() == first.dataset.items.size());
  for (const auto& stage : second.stages) {
    CHECK(stage.movies == first.stages.back().movies);
    CHECK(stage.users == first.stages.back().users);
    CHECK(stage.ratings == first.stages.back().ratings);
  }
}

TEST_CASE("filters that remove everything are an error") {
  RatingsDataset d = filter_fixture();
  CHECK_THROWS_AS(apply_filters(d, {}, {0.01, 50}), DomainError);
  CHECK_THROWS_AS(apply_filters(d, aligned_1_to_100(), {0.01, 1000}), DomainError);
}

TEST_CASE("top fraction outside its domain is rejected") {
  RatingsDataset d = filter_fixture();
  CHECK_THROWS_AS(apply_filters(d, aligned_1_to_100(), {1.0, 50}), DomainError);
  CHECK_THROWS_AS(apply_filters(d, aligned_1_to_100(), {-0.1, 50}), DomainError);
}

TEST_CASE("holdout split takes round(fraction * n) per user") {
  std::vector<Rating> rs;
  for (std::int64_t i = 1; i <= 10; ++i) rs.push_back({1, i, 4, 100 + i});
  RatingsDataset d = make_dataset(std::move(rs));
  SplitSpec s;
  s.test_fraction = 0.2;
  s.seed = 5;
  SplitResult r = split_dataset(d, s);
  CHECK(r.train.ratings.size() == 8);
  CHECK(r.test.ratings.size() == 2);
  CHECK(r.train.items.size() == d.items.size());
  CHECK(r.test.items.size() == d.items.size());
}

TEST_CASE("split halves partition the input") {
  std::vector<Rating> rs;
  for (std::int64_t u = 1; u <= 5; ++u)
    for (std::int64_t i = 1; i <= 12; ++i)
      rs.push_back({u, i * u, int(1 + (u + i) % 5), 100});
  RatingsDataset d = make_dataset(std::move(rs));
  SplitSpec s;
  s.test_fraction = 0.25;
  SplitResult r = split_dataset(d, s);

  std::set<std::pair<std::int64_t, std::int64_t>> train_keys, test_keys;
  for (const auto& x : r.train.ratings) train_keys.emplace(x.user, x.item);
  for (const auto& x : r.test.ratings) test_keys.emplace(x.user, x.item);
  std::vector<std::pair<std::int64_t, std::int64_t>> overlap;
  std::set_intersection(train_keys.begin(), train_keys.end(), test_keys.begin(),
                        test_keys.end(), std::back_inserter(overlap));
  CHECK(overlap.empty());

  std::vector<Rating> merged = r.train.ratings;
  merged.insert(merged.end(), r.test.ratings.begin(), r.test.ratings.end());
  std::sort(merged.begin(), merged.end(), [](const Rating& a, const Rating& b) {
    if (a.user != b.user) return a.user < b.user;
    return a.item < b.item;
  });
  CHECK(same_ratings(merged, d.ratings));
}

TEST_CASE("splits are reproducible and keyed per user") {
  std::vector<Rating> rs;
  for (std::int64_t i = 1; i <= 10; ++i) rs.push_back({7, i, 4, 100});
  RatingsDataset solo = make_dataset(rs);

  auto with_other = rs;
  for (std::int64_t i = 1; i <= 6; ++i) with_other.push_back({8, i, 3, 100});
  RatingsDataset both = make_dataset(std::move(with_other));

  SplitSpec s;
  s.test_fraction = 0.3;
  s.seed = 99;
  SplitResult a = split_dataset(solo, s);
  SplitResult b = split_dataset(solo, s);
  CHECK(same_ratings(a.test.ratings, b.test.ratings));
  CHECK(same_ratings(a.train.ratings, b.train.ratings));

  // user 7's assignment ignores user 8's presence
  SplitResult c = split_dataset(both, s);
  std::vector<Rating> user7_test;
  for (const auto& r : c.test.ratings)
    if (r.user == 7) user7_test.push_back(r);
  CHECK(same_ratings(user7_test, a.test.ratings));

  s.seed = 100;
  SplitResult e = split_dataset(solo, s);
  CHECK_FALSE(same_ratings(e.test.ratings, a.test.ratings));
}

TEST_CASE("a user who would lose all training data stops the split") {
  RatingsDataset d = make_dataset({{42, 1, 4, 100}, {42, 2, 5, 100}});
  SplitSpec s;
  s.test_fraction = 0.99;
  try {
    split_dataset(d, s);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("42") != std::string::npos);
  }
}

TEST_CASE("split spec validation rejects bad fields") {
  RatingsDataset d = make_dataset({{1, 1, 4, 100}});
  SplitSpec s;
  s.test_fraction = 0.0;
  s.positive_threshold = 9;
  try {
    split_dataset(d, s);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() == 2);
  }
}

TEST_CASE("hand-computed precision recall and f1") {
  // user 1: recommended {a..e} = {101, 102, 300, 301, 302}, positives
  // {101, 102, 103, 104} -> precision 2/5, recall 2/4
  RatingsDataset test = make_dataset({{1, 101, 5, 0},
                                      {1, 102, 4, 0},
                                      {1, 103, 4, 0},
                                      {1, 104, 5, 0},
                                      {1, 105, 2, 0}});
  std::vector<Recommendation> recs{
      {1, {{101, 4.8}, {102, 4.6}, {300, 4.4}, {301, 4.2}, {302, 4.0}}}};
  EvalReport r = precision_recall_f1(recs, test, 4, 5, "kgA");
  CHECK(r.kg == "kgA");
  CHECK(r.users_evaluated == 1);
  CHECK(r.top_n == 5);
  CHECK(r.precision == testutil::approx(0.4).margin(1e-12));
  CHECK(r.recall == testutil::approx(0.5).margin(1e-12));
  CHECK(r.f1 == testutil::approx(0.4444).margin(1e-4));
}

TEST_CASE("perfect and disjoint recommendation lists") {
  RatingsDataset test =
      make_dataset({{1, 11, 5, 0}, {1, 12, 4, 0}, {1, 13, 5, 0}});
  std::vector<Recommendation> hit{{1, {{11, 5.0}, {12, 4.9}, {13, 4.8}}}};
  EvalReport perfect = precision_recall_f1(hit, test, 4, 3, "kg");
  CHECK(perfect.precision == doctest::Approx(1.0));
  CHECK(perfect.recall == doctest::Approx(1.0));
  CHECK(perfect.f1 == doctest::Approx(1.0));

  std::vector<Recommendation> miss{{1, {{91, 5.0}, {92, 4.9}}}};
  EvalReport zero = precision_recall_f1(miss, test, 4, 2, "kg");
  CHECK(zero.precision == 0.0);
  CHECK(zero.recall == 0.0);
  CHECK(zero.f1 == 0.0);
}

TEST_CASE("users without test positives are skipped") {
  RatingsDataset test = make_dataset({{1, 11, 5, 0}, {2, 11, 2, 0}});
  std::vector<Recommendation> recs{{1, {{11, 4.0}}}, {2, {{11, 4.0}}}};
  EvalReport r = precision_recall_f1(recs, test, 4, 1, "kg");
  CHECK(r.users_evaluated == 1);
  CHECK(r.precision == doctest::Approx(1.0));
}

TEST_CASE("a user with positives but no recommendations scores zero") {
  RatingsDataset test = make_dataset({{1, 11, 5, 0}, {2, 12, 5, 0}});
  std::vector<Recommendation> recs{{1, {{11, 4.0}}}};
  EvalReport r = precision_recall_f1(recs, test, 4, 1, "kg");
  CHECK(r.users_evaluated == 2);
  CHECK(r.precision == doctest::Approx(0.5));
  CHECK(r.recall == doctest::Approx(0.5));
}

TEST_CASE("no evaluable user is an error") {
  RatingsDataset test = make_dataset({{1, 11, 2, 0}, {2, 12, 3, 0}});
  std::vector<Recommendation> recs{{1, {{11, 4.0}}}};
  CHECK_THROWS_AS(precision_recall_f1(recs, test, 4, 1, "kg"), DomainError);
}

TEST_CASE("metric bounds hold on randomized instances") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rating> rs;
    for (std::int64_t u = 1; u <= 3; ++u)
      for (std::int64_t i = 1; i <= 8; ++i)
        if (rng.unit() < 0.6)
          rs.push_back({u, i, int(1 + rng.bounded(5)), 0});
    RatingsDataset test = make_dataset(std::move(rs));

    std::vector<Recommendation> recs;
    for (std::int64_t u = 1; u <= 3; ++u) {
      Recommendation rec{u, {}};
      for (std::int64_t i = 1; i <= 8; ++i)
        if (rng.unit() < 0.4)
          rec.items.push_back({i + (rng.unit() < 0.3 ? 100 : 0), 5.0 - 0.1 * double(i)});
      recs.push_back(std::move(rec));
    }
    try {
      EvalReport r = precision_recall_f1(recs, test, 4, 8, "kg");
      CHECK(r.precision >= 0.0);
      CHECK(r.precision <= 1.0);
      CHECK(r.recall >= 0.0);
      CHECK(r.recall <= 1.0);
      CHECK(r.f1 >= 0.0);
      CHECK(r.f1 <= 1.0);
      CHECK(r.f1 <= 2 * r.precision + 1e-12);
      CHECK(r.f1 <= 2 * r.recall + 1e-12);
    } catch (const DomainError&) {
      // no user with a positive in this draw; nothing to check
    }
  }
}
