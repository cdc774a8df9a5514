#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgrec/alignment.hpp"
#include "kgrec/embedding.hpp"

namespace kgrec {

// A user's training-time ratings, sorted by item id, one entry per item.
struct UserProfile {
  std::int64_t user = 0;
  std::vector<std::pair<std::int64_t, double>> ratings;
};

struct ScoredItem {
  std::int64_t item;
  double score;
};

// Scores are non-increasing; equal scores are ordered by ascending item id.
struct Recommendation {
  std::int64_t user = 0;
  std::vector<ScoredItem> items;
};

// Catalog items mapped to their entity vectors under one KG. Items whose
// entity has no embedding row are excluded and reported in missing().
class ItemVectorIndex {
 public:
  static ItemVectorIndex build(const EmbeddingSpace& space,
                               const AlignmentMap& alignment,
                               const std::string& kg,
                               const std::vector<std::int64_t>& items);

  const std::string& kg() const { return kg_; }
  std::uint32_t dim() const { return dim_; }
  const std::vector<std::int64_t>& items() const { return items_; }      // ascending
  const std::vector<std::int64_t>& missing() const { return missing_; }  // ascending
  bool contains(std::int64_t item) const;
  std::span<const double> vector_of(std::int64_t item) const;  // throws LookupError

 private:
  std::string kg_;
  std::uint32_t dim_ = 0;
  std::vector<std::int64_t> items_;
  std::vector<double> vectors_;
  std::unordered_map<std::int64_t, std::uint32_t> row_;
  std::vector<std::int64_t> missing_;
};

// Similarity-weighted average of the user's ratings, with weights
// w(i, j) = max(cosine(i, j), 0). Returns nullopt when the clamped weight
// mass is <= 1e-12 (the score is undefined, not zero). Scoring an item the
// user already rated is a contract violation and throws DomainError.
std::optional<double> score_item(const UserProfile& u, std::int64_t item,
                                 const ItemVectorIndex& idx);

// Per item, its k most similar other items by cosine; non-positive
// similarities are dropped. With k = catalog - 1 the table is exhaustive and
// table-based scores equal direct ones.
class SimilarityTable {
 public:
  static SimilarityTable build(const ItemVectorIndex& idx, std::size_t k,
                               unsigned threads = 1);

  // Neighbors of `item`, ordered by similarity descending (ties by item id).
  std::vector<std::pair<std::int64_t, double>> neighbors(std::int64_t item) const;

  // w(candidate, rated): stored similarity, or 0 when not a neighbor.
  double weight(std::int64_t candidate, std::int64_t rated) const;

  const std::vector<std::int64_t>& items() const { return items_; }

 private:
  friend std::optional<double> score_item(const UserProfile&, std::int64_t,
                                          const SimilarityTable&);
  std::vector<std::int64_t> items_;
  std::unordered_map<std::int64_t, std::uint32_t> row_;
  // per item, (neighbor, similarity) sorted by neighbor id for lookup
  std::vector<std::vector<std::pair<std::int64_t, double>>> rows_;
};

std::optional<double> score_item(const UserProfile& u, std::int64_t item,
                                 const SimilarityTable& table);

// Top-n over the candidate set. Candidates must exclude the user's rated
// items; candidates whose score is undefined are left out, so fewer than n
// results (or none) is valid output.
Recommendation recommend_top_n(const UserProfile& u, std::size_t n,
                               const SimilarityTable& table,
                               const std::vector<std::int64_t>& candidates);

// TSV dump: user_id, rank (1-based), item_id, score with 6 decimals.
void write_recommendations(const std::vector<Recommendation>& recs,
                           const std::string& path);
std::vector<Recommendation> read_recommendations(const std::string& path);

}  // namespace kgrec
