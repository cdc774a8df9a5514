#include "kgrec/bias.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgrec/chi2.hpp"
#include "kgrec/error.hpp"

#include "testutil.hpp"

using namespace kgrec;

namespace {

using Assignment = std::map<std::int64_t, std::set<std::string>>;

CategoricalFeature two_value_feature() {
  // item 1 carries X, item 2 carries Y
  Assignment a{{1, {"X"}}, {2, {"Y"}}};
  return make_top_feature("side", a, 2);
}

std::vector<std::int64_t> repeated(std::int64_t item, int n,
                                   std::vector<std::int64_t> tail = {}) {
  std::vector<std::int64_t> out(std::size_t(n), item);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace

TEST_CASE("top feature keeps the most frequent values, ties by name") {
  Assignment a{{1, {"USA"}}, {2, {"USA"}}, {3, {"USA", "UK"}}, {4, {"FR"}}};
  CategoricalFeature f = make_top_feature("country", a, 2);
  CHECK(f.name == "country");
  // USA has 3 pairs; FR and UK tie at 1, FR wins alphabetically
  CHECK(f.values == std::vector<std::string>{"USA", "FR"});

  CategoricalFeature all = make_top_feature("country", a, 10);
  CHECK(all.values == std::vector<std::string>{"USA", "FR", "UK"});

  CHECK_THROWS_AS(make_top_feature("country", Assignment{{1, {}}}, 3),
                  DomainError);
}

TEST_CASE("distribution over single-valued recommendations") {
  Assignment a{{1, {"USA"}}, {2, {"USA"}}, {3, {"USA"}}, {4, {"UK"}}};
  CategoricalFeature f = make_top_feature("country", a, 10);
  FeatureDistribution d = feature_distribution({1, 2, 3, 4}, f);
  CHECK(d.total == 4);
  CHECK(d.p.at("USA") == doctest::Approx(0.75));
  CHECK(d.p.at("UK") == doctest::Approx(0.25));
}

TEST_CASE("multi-valued items contribute one pair per value") {
  Assignment a{{1, {"USA", "UK"}}, {2, {"USA"}}};
  CategoricalFeature f = make_top_feature("country", a, 10);
  FeatureDistribution d = feature_distribution({1, 2}, f);
  CHECK(d.total == 3);
  CHECK(d.p.at("USA") == doctest::Approx(2.0 / 3.0));
  CHECK(d.p.at("UK") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("repeated recommendation instances count every time") {
  Assignment a{{1, {"USA"}}, {2, {"UK"}}};
  CategoricalFeature f = make_top_feature("country", a, 10);
  FeatureDistribution d = feature_distribution({1, 1, 1, 2}, f);
  CHECK(d.counts.at("USA") == 3);
  CHECK(d.counts.at("UK") == 1);
}

TEST_CASE("fractions sum to one exactly when all values are inside C") {
  Assignment a{{1, {"USA", "DE"}}, {2, {"USA"}}};
  CategoricalFeature f = make_top_feature("country", a, 1);  // C = {USA}
  FeatureDistribution d = feature_distribution({1, 2}, f);
  CHECK(d.total == 3);  // the DE pair still counts toward the denominator
  double sum = 0;
  for (const auto& [v, p] : d.p) sum += p;
  CHECK(sum == doctest::Approx(2.0 / 3.0));

  CategoricalFeature closed = make_top_feature("country", a, 10);
  FeatureDistribution full = feature_distribution({1, 2}, closed);
  sum = 0;
  for (const auto& [v, p] : full.p) sum += p;
  CHECK(sum == testutil::approx(1.0).margin(1e-12));
}

TEST_CASE("recommendations without any assignment pairs are an error") {
  Assignment a{{1, {"USA"}}};
  CategoricalFeature f = make_top_feature("country", a, 10);
  CHECK_THROWS_AS(feature_distribution({7, 8}, f), DomainError);
}

TEST_CASE("expected fractions follow catalog pair counts") {
  Assignment a{{1, {"USA"}}, {2, {"USA"}}, {3, {"USA"}}, {4, {"UK"}}};
  CategoricalFeature f = make_top_feature("country", a, 10);
  auto ce = expected_fractions({1, 2, 3, 4}, f);
  CHECK(ce.at("USA") == doctest::Approx(0.75));
  CHECK(ce.at("UK") == doctest::Approx(0.25));

  auto solo = expected_fractions({1, 2, 3}, f);
  CHECK(solo.at("USA") == doctest::Approx(1.0));

  CHECK_THROWS_AS(expected_fractions({99}, f), DomainError);
}

TEST_CASE("weighted expectation uses the given weights and defaults to zero") {
  Assignment a{{1, {"USA"}}, {2, {"UK"}}, {3, {"FR"}}};
  CategoricalFeature f = make_top_feature("country", a, 10);
  std::map<std::int64_t, std::uint64_t> weights{{1, 3}, {2, 1}};
  auto ce = expected_fractions_weighted({1, 2, 3}, f, weights);
  CHECK(ce.at("USA") == doctest::Approx(0.75));
  CHECK(ce.at("UK") == doctest::Approx(0.25));
  CHECK(ce.at("FR") == doctest::Approx(0.0));  // no weight entry

  CHECK_THROWS_AS(expected_fractions_weighted({3}, f, weights), DomainError);
}

TEST_CASE("goodness-of-fit statistic matches the hand computation") {
  std::map<std::string, std::map<std::string, std::uint64_t>> observed{
      {"en", {{"A", 60}, {"B", 40}}}};
  std::map<std::string, double> expected{{"A", 0.5}, {"B", 0.5}};
  std::map<std::string, std::uint64_t> totals{{"en", 100}};
  std::vector<std::string> values{"A", "B"};

  ChiSquare one = chi_square_stat(observed, expected, totals, values);
  CHECK(one.per_kg.at("en") == testutil::approx(4.0).margin(1e-12));
  CHECK(one.sum == testutil::approx(4.0).margin(1e-12));

  observed["de"] = {{"A", 60}, {"B", 40}};
  totals["de"] = 100;
  ChiSquare two = chi_square_stat(observed, expected, totals, values);
  CHECK(two.per_kg.at("de") == doctest::Approx(4.0));
  CHECK(two.sum == testutil::approx(8.0).margin(1e-12));
}

TEST_CASE("exact agreement gives a zero statistic") {
  std::map<std::string, std::map<std::string, std::uint64_t>> observed{
      {"en", {{"A", 50}, {"B", 50}}}};
  ChiSquare r = chi_square_stat(observed, {{"A", 0.5}, {"B", 0.5}},
                                {{"en", 100}}, {"A", "B"});
  CHECK(r.sum == testutil::approx(0.0).margin(1e-12));
}

TEST_CASE("doubling all counts doubles the statistic") {
  std::map<std::string, double> expected{{"A", 0.5}, {"B", 0.5}};
  std::vector<std::string> values{"A", "B"};
  ChiSquare base = chi_square_stat({{"en", {{"A", 60}, {"B", 40}}}}, expected,
                                   {{"en", 100}}, values);
  ChiSquare doubled = chi_square_stat({{"en", {{"A", 120}, {"B", 80}}}},
                                      expected, {{"en", 200}}, values);
  CHECK(doubled.sum == testutil::approx(2 * base.sum).margin(1e-9));
}

TEST_CASE("an expected-zero cell aborts") {
  std::map<std::string, std::map<std::string, std::uint64_t>> observed{
      {"en", {{"A", 60}, {"B", 40}}}};
  CHECK_THROWS_AS(chi_square_stat(observed, {{"A", 1.0}, {"B", 0.0}},
                                  {{"en", 100}}, {"A", "B"}),
                  DomainError);
  CHECK_THROWS_AS(
      chi_square_stat(observed, {{"A", 1.0}}, {{"en", 100}}, {"A", "B"}),
      DomainError);
}

TEST_CASE("verdict arithmetic and boundaries") {
  Verdict v = significance_verdict(60.0, 5, 10, 0.05);
  CHECK(v.df == 36);
  CHECK(v.significant);  // 60 > 50.998
  CHECK(v.p_value < 0.05);

  Verdict null = significance_verdict(0.0, 5, 10, 0.05);
  CHECK_FALSE(null.significant);
  CHECK(null.p_value == doctest::Approx(1.0));

  // straddle the df=36 critical value
  CHECK_FALSE(significance_verdict(50.9, 5, 10, 0.05).significant);
  CHECK(significance_verdict(51.1, 5, 10, 0.05).significant);

  CHECK_THROWS_AS(significance_verdict(4.0, 1, 10, 0.05), DomainError);
  CHECK_THROWS_AS(significance_verdict(4.0, 2, 1, 0.05), DomainError);
  CHECK_THROWS_AS(significance_verdict(4.0, 2, 2, 0.0), DomainError);
}

TEST_CASE("verdict agrees with the quantile function") {
  for (double chi2 : {10.0, 30.0, 45.0, 50.998, 55.0, 70.0}) {
    Verdict v = significance_verdict(chi2, 5, 10, 0.05);
    double critical = chi_square_quantile(0.95, 36);
    CHECK(v.significant == (chi2 > critical));
  }
}

TEST_CASE("contingency statistic on a symmetric 2x2 table") {
  std::map<std::string, std::map<std::string, std::uint64_t>> observed{
      {"a", {{"X", 30}, {"Y", 10}}}, {"b", {{"X", 10}, {"Y", 30}}}};
  double chi2 = contingency_chi_square(observed, {"X", "Y"});
  CHECK(chi2 == testutil::approx(20.0).margin(1e-9));

  std::map<std::string, std::map<std::string, std::uint64_t>> flat{
      {"a", {{"X", 20}, {"Y", 20}}}, {"b", {{"X", 20}, {"Y", 20}}}};
  CHECK(contingency_chi_square(flat, {"X", "Y"}) ==
        testutil::approx(0.0).margin(1e-12));

  std::map<std::string, std::map<std::string, std::uint64_t>> zero{
      {"a", {{"X", 0}}}, {"b", {{"X", 0}}}};
  CHECK_THROWS_AS(contingency_chi_square(zero, {"X"}), DomainError);
}

TEST_CASE("genre partitions select carrier items and keep all users") {
  RatingsDataset d;
  d.items[1].genres = {"Drama"};
  d.items[2].genres = {"Drama"};
  d.items[3].genres = {"Drama", "Comedy"};
  d.items[4].genres = {"Comedy"};
  d.items[5].genres = {"Comedy"};
  d.ratings = {{7, 1, 5, 0}, {7, 3, 4, 0}, {7, 4, 2, 0}, {9, 1, 3, 0}};

  RatingsDataset drama = genre_partition(d, "Drama");
  CHECK(drama.items.size() == 3);
  CHECK(drama.items.count(1));
  CHECK(drama.items.count(2));
  CHECK(drama.items.count(3));
  REQUIRE(drama.ratings.size() == 3);
  // user 9 has a single rating and still appears: user filters are not
  // re-applied on partitions
  CHECK(drama.user_ids() == std::set<std::int64_t>{7, 9});

  RatingsDataset comedy = genre_partition(d, "Comedy");
  CHECK(comedy.items.size() == 3);  // the multi-genre item 3 is in both
  CHECK(comedy.items.count(3));
  CHECK(comedy.items.count(4));

  CHECK_THROWS_AS(genre_partition(d, "Horror"), DomainError);
}

TEST_CASE("bias report ties the pieces together") {
  CategoricalFeature f = two_value_feature();
  std::map<std::string, std::vector<std::int64_t>> recs{
      {"kgA", repeated(1, 60, repeated(2, 40))},
      {"kgB", repeated(1, 50, repeated(2, 50))}};
  std::map<std::string, double> expected{{"X", 0.5}, {"Y", 0.5}};

  BiasReport r = make_bias_report("side", f, recs, expected, 0.05);
  CHECK(r.feature == "side");
  CHECK(r.values == std::vector<std::string>{"X", "Y"});
  CHECK(r.kgs == std::vector<std::string>{"kgA", "kgB"});
  CHECK(r.counts.at("kgA").at("X") == 60);
  CHECK(r.totals.at("kgA") == 100);
  CHECK(r.totals.at("kgB") == 100);
  CHECK(r.p.at("kgA").at("X") == doctest::Approx(0.6));
  CHECK(r.p.at("kgB").at("Y") == doctest::Approx(0.5));
  CHECK(r.chi2.per_kg.at("kgA") == doctest::Approx(4.0));
  CHECK(r.chi2.per_kg.at("kgB") == testutil::approx(0.0).margin(1e-12));
  CHECK(r.chi2.sum == doctest::Approx(4.0));
  CHECK(r.verdict.df == 1);
  CHECK(r.verdict.significant);  // p about 0.0455 at df 1
  CHECK(r.verdict.p_value == testutil::approx(0.0455).margin(2e-3));
  CHECK(r.contingency_chi2 == testutil::approx(2.0202).margin(1e-3));
  CHECK(r.contingency_p_value == testutil::approx(0.155).margin(1e-2));
}
