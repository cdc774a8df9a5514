#include "kgrec/metrics.hpp"

#include <map>
#include <set>

#include "kgrec/error.hpp"

namespace kgrec {

EvalReport precision_recall_f1(const std::vector<Recommendation>& recs,
                               const RatingsDataset& test,
                               int positive_threshold, std::size_t top_n,
                               const std::string& kg_label) {
  std::map<std::int64_t, std::set<std::int64_t>> positives;
  for (const Rating& r : test.ratings)
    if (r.value >= positive_threshold) positives[r.user].insert(r.item);
  if (positives.empty())
    throw DomainError("no user has a positive test rating at threshold " +
                      std::to_string(positive_threshold));

  std::map<std::int64_t, const Recommendation*> by_user;
  for (const auto& rec : recs) by_user[rec.user] = &rec;

  double precision_sum = 0, recall_sum = 0;
  for (const auto& [user, pos] : positives) {
    auto it = by_user.find(user);
    std::size_t recommended = 0, hits = 0;
    if (it != by_user.end()) {
      recommended = it->second->items.size();
      for (const auto& si : it->second->items)
        if (pos.count(si.item)) ++hits;
    }
    // an empty recommendation list scores 0 for a user who had positives
    precision_sum +=
        recommended ? static_cast<double>(hits) / recommended : 0.0;
    recall_sum += static_cast<double>(hits) / static_cast<double>(pos.size());
  }

  EvalReport report;
  report.kg = kg_label;
  report.top_n = top_n;
  report.users_evaluated = positives.size();
  report.precision = precision_sum / static_cast<double>(positives.size());
  report.recall = recall_sum / static_cast<double>(positives.size());
  report.f1 = (report.precision + report.recall > 0)
                  ? 2.0 * report.precision * report.recall /
                        (report.precision + report.recall)
                  : 0.0;
  return report;
}

}  // namespace kgrec
