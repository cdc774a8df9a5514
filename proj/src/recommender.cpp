#include "kgrec/recommender.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <thread>

#include "kgrec/error.hpp"
#include "kgrec/gzio.hpp"

namespace kgrec {

namespace {
constexpr double kWeightFloor = 1e-12;
}

ItemVectorIndex ItemVectorIndex::build(const EmbeddingSpace& space,
                                       const AlignmentMap& alignment,
                                       const std::string& kg,
                                       const std::vector<std::int64_t>& items) {
  ItemVectorIndex idx;
  idx.kg_ = kg;
  idx.dim_ = space.dim;
  for (std::int64_t item : items) {
    const std::string* entity = alignment.find(item, kg);
    std::int32_t row = entity ? space.find(*entity) : -1;
    if (row < 0) {
      idx.missing_.push_back(item);
      continue;
    }
    auto vec = space.vector_of(row);
    idx.row_.emplace(item, static_cast<std::uint32_t>(idx.items_.size()));
    idx.items_.push_back(item);
    idx.vectors_.insert(idx.vectors_.end(), vec.begin(), vec.end());
  }
  std::sort(idx.missing_.begin(), idx.missing_.end());
  // items_ keeps the caller's order; canonicalize to ascending ids
  std::vector<std::int64_t> sorted = idx.items_;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != idx.items_) {
    std::vector<double> vectors(idx.vectors_.size());
    std::unordered_map<std::int64_t, std::uint32_t> rows;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      std::uint32_t old_row = idx.row_.at(sorted[i]);
      std::copy_n(idx.vectors_.data() + std::size_t(old_row) * idx.dim_,
                  idx.dim_, vectors.data() + i * idx.dim_);
      rows.emplace(sorted[i], static_cast<std::uint32_t>(i));
    }
    idx.items_ = std::move(sorted);
    idx.vectors_ = std::move(vectors);
    idx.row_ = std::move(rows);
  }
  return idx;
}

bool ItemVectorIndex::contains(std::int64_t item) const {
  return row_.count(item) != 0;
}

std::span<const double> ItemVectorIndex::vector_of(std::int64_t item) const {
  auto it = row_.find(item);
  if (it == row_.end())
    throw LookupError("item has no vector: " + std::to_string(item));
  return {vectors_.data() + std::size_t(it->second) * dim_, dim_};
}

namespace {

void check_not_rated(const UserProfile& u, std::int64_t item) {
  auto it = std::lower_bound(
      u.ratings.begin(), u.ratings.end(), item,
      [](const auto& a, std::int64_t b) { return a.first < b; });
  if (it != u.ratings.end() && it->first == item)
    throw DomainError("scoring item " + std::to_string(item) +
                      " already rated by user " + std::to_string(u.user));
}

std::optional<double> finish_score(double weight_sum, double weighted_ratings) {
  if (weight_sum <= kWeightFloor) return std::nullopt;
  return weighted_ratings / weight_sum;
}

}  // namespace

std::optional<double> score_item(const UserProfile& u, std::int64_t item,
                                 const ItemVectorIndex& idx) {
  check_not_rated(u, item);
  auto candidate = idx.vector_of(item);
  double wsum = 0, wr = 0;
  for (const auto& [rated, rating] : u.ratings) {
    if (!idx.contains(rated)) continue;
    double w = cosine(candidate, idx.vector_of(rated));
    if (w <= 0) continue;
    wsum += w;
    wr += w * rating;
  }
  return finish_score(wsum, wr);
}

std::optional<double> score_item(const UserProfile& u, std::int64_t item,
                                 const SimilarityTable& table) {
  check_not_rated(u, item);
  double wsum = 0, wr = 0;
  for (const auto& [rated, rating] : u.ratings) {
    double w = table.weight(item, rated);
    if (w <= 0) continue;
    wsum += w;
    wr += w * rating;
  }
  return finish_score(wsum, wr);
}

SimilarityTable SimilarityTable::build(const ItemVectorIndex& idx,
                                       std::size_t k, unsigned threads) {
  SimilarityTable t;
  t.items_ = idx.items();
  t.rows_.resize(t.items_.size());
  for (std::size_t i = 0; i < t.items_.size(); ++i)
    t.row_.emplace(t.items_[i], static_cast<std::uint32_t>(i));

  auto fill_row = [&](std::size_t i) {
    std::int64_t item = t.items_[i];
    auto self = idx.vector_of(item);
    std::vector<std::pair<std::int64_t, double>> sims;
    sims.reserve(t.items_.size());
    for (std::int64_t other : t.items_) {
      if (other == item) continue;
      double c = cosine(self, idx.vector_of(other));
      if (c > 0) sims.emplace_back(other, c);
    }
    // keep the k most similar; ties at the boundary resolved by item id
    std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (sims.size() > k) sims.resize(k);
    std::sort(sims.begin(), sims.end());  // by neighbor id, for weight lookup
    t.rows_[i] = std::move(sims);
  };

  std::size_t n = t.items_.size();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fill_row(i);
  } else {
    unsigned tcount = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    for (unsigned tid = 0; tid < tcount; ++tid)
      pool.emplace_back([&, tid] {
        for (std::size_t i = tid; i < n; i += tcount) fill_row(i);
      });
    for (auto& th : pool) th.join();
  }
  return t;
}

std::vector<std::pair<std::int64_t, double>> SimilarityTable::neighbors(
    std::int64_t item) const {
  auto it = row_.find(item);
  if (it == row_.end())
    throw LookupError("item not in similarity table: " + std::to_string(item));
  auto out = rows_[it->second];
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

double SimilarityTable::weight(std::int64_t candidate, std::int64_t rated) const {
  auto it = row_.find(candidate);
  if (it == row_.end())
    throw LookupError("item not in similarity table: " +
                      std::to_string(candidate));
  const auto& row = rows_[it->second];
  auto jt = std::lower_bound(
      row.begin(), row.end(), rated,
      [](const auto& a, std::int64_t b) { return a.first < b; });
  if (jt == row.end() || jt->first != rated) return 0.0;
  return jt->second;
}

Recommendation recommend_top_n(const UserProfile& u, std::size_t n,
                               const SimilarityTable& table,
                               const std::vector<std::int64_t>& candidates) {
  Recommendation rec;
  rec.user = u.user;
  rec.items.reserve(candidates.size());
  for (std::int64_t item : candidates) {
    auto s = score_item(u, item, table);
    if (s) rec.items.push_back({item, *s});
  }
  std::sort(rec.items.begin(), rec.items.end(),
            [](const ScoredItem& a, const ScoredItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item < b.item;
            });
  if (rec.items.size() > n) rec.items.resize(n);
  return rec;
}

void write_recommendations(const std::vector<Recommendation>& recs,
                           const std::string& path) {
  LineSink sink(path);
  char buf[128];
  for (const auto& rec : recs) {
    for (std::size_t rank = 0; rank < rec.items.size(); ++rank) {
      std::snprintf(buf, sizeof buf, "%lld\t%zu\t%lld\t%.6f",
                    static_cast<long long>(rec.user), rank + 1,
                    static_cast<long long>(rec.items[rank].item),
                    rec.items[rank].score);
      sink.write(buf);
    }
  }
  sink.close();
}

std::vector<Recommendation> read_recommendations(const std::string& path) {
  LineSource src(path);
  std::vector<Recommendation> recs;
  std::string line;
  while (src.next(line)) {
    if (line.empty()) continue;
    std::size_t ln = src.line_number();
    long long user = 0, item = 0;
    std::size_t rank = 0;
    double score = 0;
    if (std::sscanf(line.c_str(), "%lld\t%zu\t%lld\t%lf", &user, &rank, &item,
                    &score) != 4)
      throw ParseError(path + ":" + std::to_string(ln) + ": bad row", ln);
    if (recs.empty() || recs.back().user != user) {
      if (rank != 1)
        throw ParseError(path + ":" + std::to_string(ln) +
                             ": ranks must restart at 1 per user",
                         ln);
      recs.push_back({user, {}});
    } else if (rank != recs.back().items.size() + 1) {
      throw ParseError(path + ":" + std::to_string(ln) + ": rank out of order",
                       ln);
    }
    recs.back().items.push_back({item, score});
  }
  return recs;
}

}  // namespace kgrec
