#include "kgrec/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "kgrec/digest.hpp"
#include "kgrec/error.hpp"
#include "kgrec/gzio.hpp"

namespace kgrec {

std::size_t RatingsDataset::user_count() const { return user_ids().size(); }

std::set<std::int64_t> RatingsDataset::user_ids() const {
  std::set<std::int64_t> users;
  for (const auto& r : ratings) users.insert(r.user);
  return users;
}

std::map<std::int64_t, std::uint64_t> RatingsDataset::rating_counts_per_item()
    const {
  std::map<std::int64_t, std::uint64_t> counts;
  for (const auto& r : ratings) ++counts[r.item];
  return counts;
}

namespace {

std::vector<std::string_view> split_double_colon(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find("::", start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 2;
  }
}

std::int64_t parse_int(std::string_view s, const std::string& what,
                       const std::string& path, std::size_t line) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError(path + ":" + std::to_string(line) + ": bad " + what +
                         " '" + std::string(s) + "'",
                     line);
  return v;
}

}  // namespace

RatingsDataset load_movielens(const std::string& ratings_path,
                              const std::string& movies_path) {
  RatingsDataset d;

  {
    LineSource src(movies_path);
    std::string line;
    while (src.next(line)) {
      if (line.empty()) continue;
      std::size_t ln = src.line_number();
      auto cols = split_double_colon(line);
      if (cols.size() != 3)
        throw ParseError(movies_path + ":" + std::to_string(ln) +
                             ": expected MovieID::Title::Genres",
                         ln);
      std::int64_t item = parse_int(cols[0], "movie id", movies_path, ln);
      ItemMeta meta;
      meta.title = std::string(cols[1]);
      std::string_view genres = cols[2];
      std::size_t start = 0;
      for (std::size_t i = 0; i <= genres.size(); ++i) {
        if (i == genres.size() || genres[i] == '|') {
          if (i > start)
            meta.genres.insert(std::string(genres.substr(start, i - start)));
          start = i + 1;
        }
      }
      if (!d.items.emplace(item, std::move(meta)).second)
        throw ParseError(movies_path + ":" + std::to_string(ln) +
                             ": duplicate movie id " + std::to_string(item),
                         ln);
    }
  }

  {
    LineSource src(ratings_path);
    std::string line;
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    while (src.next(line)) {
      if (line.empty()) continue;
      std::size_t ln = src.line_number();
      auto cols = split_double_colon(line);
      if (cols.size() != 4)
        throw ParseError(ratings_path + ":" + std::to_string(ln) +
                             ": expected UserID::MovieID::Rating::Timestamp",
                         ln);
      Rating r;
      r.user = parse_int(cols[0], "user id", ratings_path, ln);
      r.item = parse_int(cols[1], "movie id", ratings_path, ln);
      std::int64_t value = parse_int(cols[2], "rating", ratings_path, ln);
      r.timestamp = parse_int(cols[3], "timestamp", ratings_path, ln);
      if (value < 1 || value > 5)
        throw ParseError(ratings_path + ":" + std::to_string(ln) +
                             ": rating out of range: " + std::to_string(value),
                         ln);
      r.value = static_cast<int>(value);
      if (!d.items.count(r.item))
        throw ParseError(ratings_path + ":" + std::to_string(ln) +
                             ": rating references unlisted movie " +
                             std::to_string(r.item),
                         ln);
      if (!seen.emplace(r.user, r.item).second)
        throw ParseError(ratings_path + ":" + std::to_string(ln) +
                             ": duplicate rating for user " +
                             std::to_string(r.user) + ", movie " +
                             std::to_string(r.item),
                         ln);
      d.ratings.push_back(r);
    }
  }

  std::sort(d.ratings.begin(), d.ratings.end(),
            [](const Rating& a, const Rating& b) {
              return std::tie(a.user, a.item) < std::tie(b.user, b.item);
            });
  d.provenance.push_back("loaded " + std::to_string(d.ratings.size()) +
                         " ratings over " + std::to_string(d.items.size()) +
                         " movies");
  return d;
}

void attach_countries(RatingsDataset& d, const std::string& countries_path) {
  LineSource src(countries_path);
  std::string line;
  if (!src.next(line))
    throw ParseError(countries_path + ": empty file (header required)", 0);
  if (line != "item_id\tcountry")
    throw ParseError(countries_path + ":1: expected header 'item_id\tcountry'",
                     1);
  while (src.next(line)) {
    if (line.empty()) continue;
    std::size_t ln = src.line_number();
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(countries_path + ":" + std::to_string(ln) +
                           ": expected 2 columns",
                       ln);
    std::int64_t item =
        parse_int(std::string_view(line).substr(0, tab), "item id",
                  countries_path, ln);
    std::string country = line.substr(tab + 1);
    if (country.empty())
      throw ParseError(countries_path + ":" + std::to_string(ln) +
                           ": empty country",
                       ln);
    auto it = d.items.find(item);
    if (it == d.items.end())
      throw ParseError(countries_path + ":" + std::to_string(ln) +
                           ": unknown item id " + std::to_string(item),
                       ln);
    it->second.countries.insert(std::move(country));
  }
}

namespace {

StageCount count_stage(const std::string& name, const RatingsDataset& d) {
  return {name, d.items.size(), d.user_count(), d.ratings.size()};
}

void drop_items(RatingsDataset& d, const std::set<std::int64_t>& removed) {
  if (removed.empty()) return;
  std::erase_if(d.ratings,
                [&](const Rating& r) { return removed.count(r.item) != 0; });
  std::erase_if(d.items,
                [&](const auto& kv) { return removed.count(kv.first) != 0; });
}

std::string filter_signature(const std::set<std::int64_t>& aligned_items,
                             const FilterParams& p) {
  std::string ids;
  for (auto id : aligned_items) {
    ids += std::to_string(id);
    ids.push_back(',');
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "filters aligned=%s top_fraction=%.9g min_user_ratings=%u",
                sha256_hex(ids).substr(0, 16).c_str(), p.top_fraction,
                p.min_user_ratings);
  return buf;
}

}  // namespace

FilterOutcome apply_filters(const RatingsDataset& d,
                            const std::set<std::int64_t>& aligned_items,
                            const FilterParams& p) {
  if (p.top_fraction < 0 || p.top_fraction >= 1)
    throw DomainError("top_fraction must be in [0, 1)");

  FilterOutcome out;
  out.stages.push_back(count_stage("input", d));

  std::string signature = filter_signature(aligned_items, p);
  bool already = std::find(d.provenance.begin(), d.provenance.end(),
                           signature) != d.provenance.end();
  if (already) {
    // same filter applied before: a second application changes nothing
    out.dataset = d;
    for (const char* stage : {"aligned", "popularity", "min-user-ratings",
                              "nonzero-movies"})
      out.stages.push_back(count_stage(stage, d));
    return out;
  }

  RatingsDataset cur = d;

  // stage 1: aligned items only
  {
    std::set<std::int64_t> removed;
    for (const auto& [item, meta] : cur.items)
      if (!aligned_items.count(item)) removed.insert(item);
    drop_items(cur, removed);
    out.stages.push_back(count_stage("aligned", cur));
  }

  // stage 2: the most-rated ceil(top_fraction * movies) movies
  {
    std::size_t m = static_cast<std::size_t>(
        std::ceil(p.top_fraction * static_cast<double>(cur.items.size())));
    if (m > 0) {
      auto counts = cur.rating_counts_per_item();
      std::vector<std::pair<std::uint64_t, std::int64_t>> order;
      order.reserve(cur.items.size());
      for (const auto& [item, meta] : cur.items)
        order.emplace_back(counts.count(item) ? counts[item] : 0, item);
      std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // cutoff ties: ascending item id
      });
      std::set<std::int64_t> removed;
      for (std::size_t i = 0; i < m && i < order.size(); ++i)
        removed.insert(order[i].second);
      drop_items(cur, removed);
    }
    out.stages.push_back(count_stage("popularity", cur));
  }

  // stage 3: users with too few remaining ratings
  {
    std::map<std::int64_t, std::uint32_t> per_user;
    for (const auto& r : cur.ratings) ++per_user[r.user];
    std::erase_if(cur.ratings, [&](const Rating& r) {
      return per_user[r.user] < p.min_user_ratings;
    });
    out.stages.push_back(count_stage("min-user-ratings", cur));
  }

  // stage 4: movies that lost all their ratings
  {
    auto counts = cur.rating_counts_per_item();
    std::set<std::int64_t> removed;
    for (const auto& [item, meta] : cur.items)
      if (!counts.count(item)) removed.insert(item);
    drop_items(cur, removed);
    out.stages.push_back(count_stage("nonzero-movies", cur));
  }

  if (cur.ratings.empty())
    throw DomainError("filter pipeline removed every rating");

  cur.provenance.push_back(signature);
  out.dataset = std::move(cur);
  return out;
}

}  // namespace kgrec
