#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgrec/ratings.hpp"

namespace kgrec {

// Multi-valued categorical item feature restricted to a fixed value set C.
// All counting is over (item, value) assignment pairs: an item carrying two
// values contributes two pairs.
struct CategoricalFeature {
  std::string name;
  std::vector<std::string> values;  // C, report order
  std::map<std::int64_t, std::set<std::string>> assignment;
};

// C = the top_k values by catalog assignment-pair count (ties by value
// ascending). Throws DomainError when the catalog carries no values at all.
CategoricalFeature make_top_feature(
    const std::string& name,
    const std::map<std::int64_t, std::set<std::string>>& assignment,
    std::size_t top_k);

struct FeatureDistribution {
  std::map<std::string, std::uint64_t> counts;  // pairs per value in C
  std::uint64_t total = 0;  // ALL assignment pairs, in or out of C
  std::map<std::string, double> p;  // counts / total; sums to <= 1
};

// Distribution over a list of recommended item instances (repeats count).
// Throws DomainError when the instances carry zero assignment pairs.
FeatureDistribution feature_distribution(
    const std::vector<std::int64_t>& recommended, const CategoricalFeature& f);

// Catalog-prevalence expectation c_e, same pair counting, each item once.
std::map<std::string, double> expected_fractions(
    const std::vector<std::int64_t>& catalog, const CategoricalFeature& f);

// Rating-weighted variant: each item's pairs are weighted by its weight
// (e.g. rating count); items without a weight entry count 0.
std::map<std::string, double> expected_fractions_weighted(
    const std::vector<std::int64_t>& catalog, const CategoricalFeature& f,
    const std::map<std::int64_t, std::uint64_t>& item_weight);

struct ChiSquare {
  std::map<std::string, double> per_kg;
  double sum = 0;
};

// Goodness of fit of each KG's observed counts against c_e * |R|, summed
// across KGs. Any c_e(c) <= 0 cell aborts (no continuity corrections).
ChiSquare chi_square_stat(
    const std::map<std::string, std::map<std::string, std::uint64_t>>&
        observed_per_kg,
    const std::map<std::string, double>& expected,
    const std::map<std::string, std::uint64_t>& totals_per_kg,
    const std::vector<std::string>& values);

struct Verdict {
  unsigned df = 0;
  double alpha = 0.05;
  double p_value = 1;
  bool significant = false;
};

// df = (|KGs| - 1) * (|C| - 1); throws DomainError when df would be <= 0.
Verdict significance_verdict(double chi2_sum, std::size_t kg_count,
                             std::size_t value_count, double alpha);

// Standard two-way contingency test over the same observed counts, with
// expectations from the table margins instead of c_e. Reported alongside the
// primary statistic, never mixed into it.
double contingency_chi_square(
    const std::map<std::string, std::map<std::string, std::uint64_t>>&
        observed_per_kg,
    const std::vector<std::string>& values);

// The sub-dataset of items carrying the genre, with other items' ratings
// dropped. User-level filters are NOT re-applied. Throws DomainError when the
// partition is empty.
RatingsDataset genre_partition(const RatingsDataset& d,
                               const std::string& genre);

struct BiasReport {
  std::string feature;
  std::vector<std::string> values;
  std::vector<std::string> kgs;
  std::map<std::string, std::map<std::string, std::uint64_t>> counts;  // kg -> value -> pairs
  std::map<std::string, std::uint64_t> totals;                         // kg -> |R|
  std::map<std::string, std::map<std::string, double>> p;              // kg -> value -> fraction
  std::map<std::string, double> expected;                              // c_e
  ChiSquare chi2;
  Verdict verdict;
  double contingency_chi2 = 0;
  double contingency_p_value = 1;
};

// recommended_per_kg: flattened recommended item instances per KG label.
BiasReport make_bias_report(
    const std::string& feature_name, const CategoricalFeature& f,
    const std::map<std::string, std::vector<std::int64_t>>& recommended_per_kg,
    const std::map<std::string, double>& expected, double alpha);

}  // namespace kgrec
