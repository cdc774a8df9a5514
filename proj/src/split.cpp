#include "kgrec/split.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "kgrec/error.hpp"
#include "kgrec/rng.hpp"

namespace kgrec {

void SplitSpec::validate() const {
  std::vector<std::string> problems;
  if (!(test_fraction > 0 && test_fraction < 1))
    problems.push_back("test_fraction must be in (0, 1)");
  if (positive_threshold < 1 || positive_threshold > 5)
    problems.push_back("positive_threshold must be in 1..5");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

SplitResult split_dataset(const RatingsDataset& d, const SplitSpec& s) {
  s.validate();
  SplitResult out;
  out.train.items = d.items;
  out.test.items = d.items;
  out.train.provenance = d.provenance;
  out.test.provenance = d.provenance;
  char note[64];
  std::snprintf(note, sizeof note, "split test_fraction=%.9g seed=%llu",
                s.test_fraction, static_cast<unsigned long long>(s.seed));
  out.train.provenance.push_back(std::string(note) + " half=train");
  out.test.provenance.push_back(std::string(note) + " half=test");

  // d.ratings is sorted by (user, item), so users form contiguous runs
  std::size_t i = 0;
  while (i < d.ratings.size()) {
    std::size_t j = i;
    std::int64_t user = d.ratings[i].user;
    while (j < d.ratings.size() && d.ratings[j].user == user) ++j;
    std::size_t n = j - i;

    auto test_count = static_cast<std::size_t>(
        std::llround(s.test_fraction * static_cast<double>(n)));
    if (test_count >= n)
      throw DomainError("split: user " + std::to_string(user) +
                        " would keep 0 training ratings (has " +
                        std::to_string(n) + ")");

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = i + k;
    SplitMix64 rng = stream_for(s.seed, static_cast<std::uint64_t>(user));
    for (std::size_t k = n; k > 1; --k)
      std::swap(order[k - 1], order[rng.bounded(k)]);

    for (std::size_t k = 0; k < n; ++k) {
      const Rating& r = d.ratings[order[k]];
      (k < test_count ? out.test : out.train).ratings.push_back(r);
    }
    i = j;
  }

  auto by_user_item = [](const Rating& a, const Rating& b) {
    if (a.user != b.user) return a.user < b.user;
    return a.item < b.item;
  };
  std::sort(out.train.ratings.begin(), out.train.ratings.end(), by_user_item);
  std::sort(out.test.ratings.begin(), out.test.ratings.end(), by_user_item);
  return out;
}

}  // namespace kgrec
