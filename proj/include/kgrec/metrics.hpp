#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kgrec/ratings.hpp"
#include "kgrec/recommender.hpp"

namespace kgrec {

struct EvalReport {
  std::string kg;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t top_n = 0;
  std::size_t users_evaluated = 0;
};

// Macro-averaged top-n accuracy. A user's positives are their test ratings at
// or above positive_threshold; users without any test positive are skipped.
// Precision and recall are averaged per user first; F1 is the harmonic mean
// of the two averages (0 when both are 0). Throws DomainError when no user is
// evaluable.
EvalReport precision_recall_f1(const std::vector<Recommendation>& recs,
                               const RatingsDataset& test,
                               int positive_threshold, std::size_t top_n,
                               const std::string& kg_label);

}  // namespace kgrec
