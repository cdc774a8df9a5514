#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace kgrec {

struct Rating {
  std::int64_t user;
  std::int64_t item;
  int value;  // 1..5
  std::int64_t timestamp;
};

struct ItemMeta {
  std::string title;
  std::set<std::string> genres;
  std::set<std::string> countries;
};

// Ratings are kept sorted by (user, item), one entry per pair. Every rated
// item id has a metadata entry in items.
struct RatingsDataset {
  std::vector<Rating> ratings;
  std::map<std::int64_t, ItemMeta> items;
  std::vector<std::string> provenance;

  std::size_t user_count() const;
  std::set<std::int64_t> user_ids() const;
  std::map<std::int64_t, std::uint64_t> rating_counts_per_item() const;
};

// MovieLens-1M dumps: "UserID::MovieID::Rating::Timestamp" and
// "MovieID::Title::Genre|Genre|...". Bytes in titles pass through untouched
// (the files are Latin-1). Malformed rows, out-of-range rating values,
// duplicate (user, item) pairs, and ratings of unlisted movies are errors.
RatingsDataset load_movielens(const std::string& ratings_path,
                              const std::string& movies_path);

// Supplemental production-country table: "item_id<TAB>country", one row per
// (item, country); a header row "item_id<TAB>country" is required. Unknown
// item ids are errors.
void attach_countries(RatingsDataset& d, const std::string& countries_path);

struct FilterParams {
  double top_fraction = 0.01;          // most-rated movies removed, ceil
  std::uint32_t min_user_ratings = 50; // users below this are removed
};

struct StageCount {
  std::string stage;
  std::size_t movies;
  std::size_t users;
  std::size_t ratings;
};

struct FilterOutcome {
  RatingsDataset dataset;
  std::vector<StageCount> stages;  // "input" plus one row per pipeline stage
};

// Pipeline: (1) keep aligned items only; (2) drop the ceil(top_fraction *
// movies) most-rated movies, ties at the cutoff broken by ascending item id;
// (3) drop users with fewer than min_user_ratings remaining ratings; (4) drop
// movies left without ratings. The outcome records a provenance line; feeding
// an already-filtered dataset through the same filter is a no-op, so the
// operation is idempotent.
FilterOutcome apply_filters(const RatingsDataset& d,
                            const std::set<std::int64_t>& aligned_items,
                            const FilterParams& p = {});

}  // namespace kgrec
