#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgrec/rng.hpp"

namespace kgrec {

using Sentences = std::vector<std::vector<std::string>>;

// Token table for training: tokens at or above min_count, ordered by count
// descending (ties by token ascending), plus the negative-sampling
// distribution proportional to frequency^0.75.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::int32_t> index;
  std::uint64_t total_count = 0;  // sum over kept tokens
  std::uint32_t min_count = 1;
  std::vector<double> noise_prob;  // normalized f^0.75 weights
  std::vector<double> noise_cdf;

  std::int32_t lookup(std::string_view token) const;  // -1 when absent
  std::size_t size() const { return tokens.size(); }

  // Draws a token index with probability noise_prob[i] (inverse CDF).
  std::int32_t sample_noise(SplitMix64& rng) const;
};

// Throws DomainError when no token survives min_count.
Vocabulary build_vocab(const Sentences& corpus, std::uint32_t min_count);

// Sentences as vocab indices; tokens below min_count are dropped.
std::vector<std::vector<std::int32_t>> encode(const Sentences& corpus,
                                              const Vocabulary& vocab);

}  // namespace kgrec
