#include "kgrec/bias.hpp"

#include <algorithm>

#include "kgrec/chi2.hpp"
#include "kgrec/error.hpp"

namespace kgrec {

CategoricalFeature make_top_feature(
    const std::string& name,
    const std::map<std::int64_t, std::set<std::string>>& assignment,
    std::size_t top_k) {
  std::map<std::string, std::uint64_t> pair_counts;
  for (const auto& [item, values] : assignment)
    for (const auto& v : values) ++pair_counts[v];
  if (pair_counts.empty())
    throw DomainError("feature '" + name + "' has no catalog assignments");

  std::vector<std::pair<std::uint64_t, std::string>> order;
  order.reserve(pair_counts.size());
  for (const auto& [v, c] : pair_counts) order.emplace_back(c, v);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  CategoricalFeature f;
  f.name = name;
  f.assignment = assignment;
  for (std::size_t i = 0; i < order.size() && i < top_k; ++i)
    f.values.push_back(order[i].second);
  return f;
}

namespace {

// (in-C counts, total pairs) accumulated over weighted item instances
template <typename Weight>
std::pair<std::map<std::string, std::uint64_t>, std::uint64_t> count_pairs(
    const std::vector<std::int64_t>& items, const CategoricalFeature& f,
    Weight weight_of) {
  std::set<std::string> in_c(f.values.begin(), f.values.end());
  std::map<std::string, std::uint64_t> counts;
  for (const auto& v : f.values) counts[v] = 0;
  std::uint64_t total = 0;
  for (std::int64_t item : items) {
    auto it = f.assignment.find(item);
    if (it == f.assignment.end()) continue;
    std::uint64_t w = weight_of(item);
    if (w == 0) continue;
    for (const auto& v : it->second) {
      total += w;
      if (in_c.count(v)) counts[v] += w;
    }
  }
  return {std::move(counts), total};
}

}  // namespace

FeatureDistribution feature_distribution(
    const std::vector<std::int64_t>& recommended, const CategoricalFeature& f) {
  auto [counts, total] =
      count_pairs(recommended, f, [](std::int64_t) { return std::uint64_t{1}; });
  if (total == 0)
    throw DomainError("recommendations carry no '" + f.name + "' assignments");
  FeatureDistribution dist;
  dist.counts = std::move(counts);
  dist.total = total;
  for (const auto& [v, c] : dist.counts)
    dist.p[v] = static_cast<double>(c) / static_cast<double>(total);
  return dist;
}

std::map<std::string, double> expected_fractions(
    const std::vector<std::int64_t>& catalog, const CategoricalFeature& f) {
  auto [counts, total] =
      count_pairs(catalog, f, [](std::int64_t) { return std::uint64_t{1}; });
  if (total == 0)
    throw DomainError("catalog carries no '" + f.name + "' assignments");
  std::map<std::string, double> out;
  for (const auto& [v, c] : counts)
    out[v] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

std::map<std::string, double> expected_fractions_weighted(
    const std::vector<std::int64_t>& catalog, const CategoricalFeature& f,
    const std::map<std::int64_t, std::uint64_t>& item_weight) {
  auto [counts, total] = count_pairs(catalog, f, [&](std::int64_t item) {
    auto it = item_weight.find(item);
    return it == item_weight.end() ? std::uint64_t{0} : it->second;
  });
  if (total == 0)
    throw DomainError("catalog carries no weighted '" + f.name +
                      "' assignments");
  std::map<std::string, double> out;
  for (const auto& [v, c] : counts)
    out[v] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

ChiSquare chi_square_stat(
    const std::map<std::string, std::map<std::string, std::uint64_t>>&
        observed_per_kg,
    const std::map<std::string, double>& expected,
    const std::map<std::string, std::uint64_t>& totals_per_kg,
    const std::vector<std::string>& values) {
  ChiSquare result;
  for (const auto& [kg, observed] : observed_per_kg) {
    auto tot_it = totals_per_kg.find(kg);
    if (tot_it == totals_per_kg.end())
      throw DomainError("chi_square_stat: missing total for KG '" + kg + "'");
    double total = static_cast<double>(tot_it->second);
    if (total <= 0)
      throw DomainError("chi_square_stat: empty recommendation set for KG '" +
                        kg + "'");
    double chi2 = 0;
    for (const auto& value : values) {
      auto e_it = expected.find(value);
      double ce = e_it == expected.end() ? 0.0 : e_it->second;
      if (ce <= 0)
        throw DomainError("chi_square_stat: expected fraction is zero for '" +
                          value + "' (expected-zero cell)");
      auto o_it = observed.find(value);
      double obs = o_it == observed.end()
                       ? 0.0
                       : static_cast<double>(o_it->second);
      double exp_count = ce * total;
      double diff = obs - exp_count;
      chi2 += diff * diff / exp_count;
    }
    result.per_kg[kg] = chi2;
    result.sum += chi2;
  }
  return result;
}

Verdict significance_verdict(double chi2_sum, std::size_t kg_count,
                             std::size_t value_count, double alpha) {
  if (kg_count < 2 || value_count < 2)
    throw DomainError(
        "significance_verdict: need >= 2 KGs and >= 2 feature values "
        "(degrees of freedom would be <= 0)");
  if (!(alpha > 0 && alpha < 1))
    throw DomainError("significance_verdict: alpha must be in (0, 1)");
  Verdict v;
  v.df = static_cast<unsigned>((kg_count - 1) * (value_count - 1));
  v.alpha = alpha;
  v.p_value = 1.0 - chi_square_cdf(chi2_sum, v.df);
  v.significant = v.p_value < alpha;
  return v;
}

double contingency_chi_square(
    const std::map<std::string, std::map<std::string, std::uint64_t>>&
        observed_per_kg,
    const std::vector<std::string>& values) {
  std::map<std::string, std::uint64_t> row_totals;  // per kg
  std::map<std::string, std::uint64_t> col_totals;  // per value
  std::uint64_t grand = 0;
  for (const auto& [kg, observed] : observed_per_kg) {
    for (const auto& value : values) {
      auto it = observed.find(value);
      std::uint64_t c = it == observed.end() ? 0 : it->second;
      row_totals[kg] += c;
      col_totals[value] += c;
      grand += c;
    }
  }
  if (grand == 0)
    throw DomainError("contingency_chi_square: all cells are zero");
  double chi2 = 0;
  for (const auto& [kg, observed] : observed_per_kg) {
    for (const auto& value : values) {
      double expected = static_cast<double>(row_totals[kg]) *
                        static_cast<double>(col_totals[value]) /
                        static_cast<double>(grand);
      if (expected <= 0)
        throw DomainError(
            "contingency_chi_square: zero-margin cell for value '" + value +
            "'");
      auto it = observed.find(value);
      double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
      double diff = obs - expected;
      chi2 += diff * diff / expected;
    }
  }
  return chi2;
}

RatingsDataset genre_partition(const RatingsDataset& d,
                               const std::string& genre) {
  RatingsDataset out;
  out.provenance = d.provenance;
  out.provenance.push_back("genre partition '" + genre + "'");
  for (const auto& [item, meta] : d.items)
    if (meta.genres.count(genre)) out.items.emplace(item, meta);
  if (out.items.empty())
    throw DomainError("genre partition '" + genre + "' is empty");
  for (const Rating& r : d.ratings)
    if (out.items.count(r.item)) out.ratings.push_back(r);
  return out;
}

BiasReport make_bias_report(
    const std::string& feature_name, const CategoricalFeature& f,
    const std::map<std::string, std::vector<std::int64_t>>& recommended_per_kg,
    const std::map<std::string, double>& expected, double alpha) {
  BiasReport report;
  report.feature = feature_name;
  report.values = f.values;
  report.expected = expected;
  for (const auto& [kg, recommended] : recommended_per_kg) {
    report.kgs.push_back(kg);
    FeatureDistribution dist = feature_distribution(recommended, f);
    report.counts[kg] = dist.counts;
    report.totals[kg] = dist.total;
    report.p[kg] = dist.p;
  }
  report.chi2 =
      chi_square_stat(report.counts, expected, report.totals, f.values);
  report.verdict = significance_verdict(report.chi2.sum, report.kgs.size(),
                                        f.values.size(), alpha);
  report.contingency_chi2 = contingency_chi_square(report.counts, f.values);
  report.contingency_p_value =
      1.0 - chi_square_cdf(report.contingency_chi2, report.verdict.df);
  return report;
}

}  // namespace kgrec
