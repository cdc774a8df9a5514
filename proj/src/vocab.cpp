#include "kgrec/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kgrec/error.hpp"

namespace kgrec {

std::int32_t Vocabulary::lookup(std::string_view token) const {
  auto it = index.find(std::string(token));
  return it == index.end() ? -1 : it->second;
}

std::int32_t Vocabulary::sample_noise(SplitMix64& rng) const {
  double u = rng.unit();
  auto it = std::upper_bound(noise_cdf.begin(), noise_cdf.end(), u);
  if (it == noise_cdf.end()) return static_cast<std::int32_t>(tokens.size()) - 1;
  return static_cast<std::int32_t>(it - noise_cdf.begin());
}

Vocabulary build_vocab(const Sentences& corpus, std::uint32_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence) ++counts[token];

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [token, count] : counts)
    if (count >= min_count) kept.emplace_back(token, count);
  if (kept.empty())
    throw DomainError("vocabulary is empty after the min_count filter");

  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.min_count = min_count;
  v.tokens.reserve(kept.size());
  v.counts.reserve(kept.size());
  for (auto& [token, count] : kept) {
    v.index.emplace(token, static_cast<std::int32_t>(v.tokens.size()));
    v.tokens.push_back(std::move(token));
    v.counts.push_back(count);
    v.total_count += count;
  }

  // noise distribution ~ count^0.75, normalized exactly
  v.noise_prob.resize(v.counts.size());
  double z = 0;
  for (std::size_t i = 0; i < v.counts.size(); ++i) {
    v.noise_prob[i] = std::pow(static_cast<double>(v.counts[i]), 0.75);
    z += v.noise_prob[i];
  }
  v.noise_cdf.resize(v.counts.size());
  double acc = 0;
  for (std::size_t i = 0; i < v.counts.size(); ++i) {
    v.noise_prob[i] /= z;
    acc += v.noise_prob[i];
    v.noise_cdf[i] = acc;
  }
  v.noise_cdf.back() = 1.0;  // guard against accumulated rounding
  return v;
}

std::vector<std::vector<std::int32_t>> encode(const Sentences& corpus,
                                              const Vocabulary& vocab) {
  std::vector<std::vector<std::int32_t>> out;
  out.reserve(corpus.size());
  for (const auto& sentence : corpus) {
    std::vector<std::int32_t> ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) {
      std::int32_t id = vocab.lookup(token);
      if (id >= 0) ids.push_back(id);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace kgrec
