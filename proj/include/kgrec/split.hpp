#pragma once

#include <cstdint>

#include "kgrec/ratings.hpp"

namespace kgrec {

struct SplitSpec {
  double test_fraction = 0.2;
  int positive_threshold = 4;  // rating >= threshold counts as a positive
  std::uint64_t seed = 1;

  void validate() const;  // throws ValidationError listing all problems
};

struct SplitResult {
  RatingsDataset train;
  RatingsDataset test;
};

// Per-user holdout: each user's ratings are shuffled by a stream keyed on
// (seed, user id) and round(test_fraction * n) of them become test data, so a
// user's split never depends on other users. A user who would keep zero
// training ratings is an error naming that user. Both halves keep the full
// item-metadata table.
SplitResult split_dataset(const RatingsDataset& d, const SplitSpec& s);

}  // namespace kgrec
