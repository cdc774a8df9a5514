#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgrec/embedding.hpp"
#include "kgrec/ntriples.hpp"
#include "kgrec/ratings.hpp"
#include "kgrec/split.hpp"
#include "kgrec/walker.hpp"

namespace kgrec {

struct KgSource {
  std::string label;
  std::vector<std::string> files;
};

struct BiasConfig {
  std::vector<std::string> features;  // "country" and/or "genre"
  std::uint32_t top_values = 10;
  double alpha = 0.05;
  bool rating_weighted = false;  // expected_basis = ratings
};

struct GenreRunsConfig {
  bool enabled = false;
  std::vector<std::string> genres;  // empty = every genre in the filtered set
};

struct ExperimentConfig {
  std::string ratings_file;
  std::string movies_file;
  std::string links_file;
  std::string countries_file;  // optional unless the country feature is on
  ParseMode parse_mode = ParseMode::Lenient;

  std::vector<KgSource> kgs;

  FilterParams filters;
  SplitSpec split;

  WalkConfig walks;  // scope is filled per graph at run time
  bool walk_scope_items = true;
  bool compress_walks = true;

  TrainParams training;

  std::uint32_t top_n = 10;
  std::uint32_t neighbors = 0;  // 0 = full catalog

  BiasConfig bias;
  GenreRunsConfig genre_runs;

  std::string output_dir = "out";
  bool cache = true;

  const KgSource* find_kg(const std::string& label) const;
};

// Parses and fully validates an INI-style config file. Relative paths are
// resolved against the config file's directory. Malformed lines throw
// ParseError; everything else (unknown keys, bad values, missing files,
// violated invariants) is collected into one ValidationError.
ExperimentConfig load_config(const std::string& path);

// Stable textual form of every field, used for the manifest's config digest.
std::string canonical_config_string(const ExperimentConfig& cfg);

}  // namespace kgrec
