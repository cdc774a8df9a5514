#include "kgrec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <set>

#include "kgrec/error.hpp"
#include "kgrec/gzio.hpp"

namespace kgrec {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    std::string item = trim(std::string_view(value).substr(pos, comma - pos));
    if (!item.empty()) out.push_back(std::move(item));
    pos = comma + 1;
  }
  return out;
}

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
              c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

class Collector {
 public:
  std::vector<std::string> problems;

  void add(const std::string& p) { problems.push_back(p); }

  void set_u32(std::uint32_t& field, const std::string& key,
               const std::string& value) {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      add(key + ": expected a non-negative integer, got '" + value + "'");
      return;
    }
    field = v;
  }

  void set_int(int& field, const std::string& key, const std::string& value) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      add(key + ": expected an integer, got '" + value + "'");
      return;
    }
    field = v;
  }

  void set_u64(std::uint64_t& field, const std::string& key,
               const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      add(key + ": expected a non-negative integer, got '" + value + "'");
      return;
    }
    field = v;
  }

  void set_double(double& field, const std::string& key,
                  const std::string& value) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      add(key + ": expected a number, got '" + value + "'");
      return;
    }
    field = v;
  }

  void set_bool(bool& field, const std::string& key, const std::string& value) {
    if (value == "true") {
      field = true;
    } else if (value == "false") {
      field = false;
    } else {
      add(key + ": expected true or false, got '" + value + "'");
    }
  }
};

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp.lexically_normal().string();
  return (base / fp).lexically_normal().string();
}

void check_file(Collector& c, const std::string& key, const std::string& path) {
  if (path.empty()) return;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    c.add(key + ": file not found: " + path);
}

void append_kv(std::string& out, const std::string& key,
               const std::string& value) {
  out += key;
  out.push_back('=');
  out += value;
  out.push_back('\n');
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

const KgSource* ExperimentConfig::find_kg(const std::string& label) const {
  for (const auto& kg : kgs)
    if (kg.label == label) return &kg;
  return nullptr;
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  Collector c;
  std::filesystem::path base = std::filesystem::path(path).parent_path();

  LineSource src(path);
  std::string raw;
  std::string section;
  std::string walk_scope = "items";
  std::string parse_mode = "lenient";
  std::string expected_basis = "catalog";
  std::set<std::string> kg_labels_seen;

  auto parse_error = [&](const std::string& msg) {
    throw ParseError(path + ":" + std::to_string(src.line_number()) + ": " + msg);
  };

  while (src.next(raw)) {
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') parse_error("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) parse_error("empty section name");
      if (section.rfind("kg.", 0) == 0) {
        std::string label = section.substr(3);
        if (!valid_label(label))
          c.add("[" + section + "]: KG label may only use letters, digits, "
                "'_', '-' and '.'");
        if (!kg_labels_seen.insert(label).second)
          c.add("[" + section + "]: duplicate KG label");
        else
          cfg.kgs.push_back({label, {}});
      } else if (section != "data" && section != "filters" &&
                 section != "split" && section != "walks" &&
                 section != "training" && section != "recommend" &&
                 section != "bias" && section != "genre_runs" &&
                 section != "output") {
        c.add("[" + section + "]: unknown section");
        section.clear();  // swallow its keys; the section itself was reported
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) parse_error("expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) parse_error("empty key");
    if (section.empty()) continue;  // inside an already-reported section

    std::string qual = "[" + section + "] " + key;
    if (section.rfind("kg.", 0) == 0) {
      if (key == "files") {
        auto files = split_list(value);
        if (files.empty()) c.add(qual + ": expected at least one file");
        auto& kg = cfg.kgs.back();
        for (auto& f : files) kg.files.push_back(resolve(base, f));
      } else {
        c.add(qual + ": unknown key");
      }
    } else if (section == "data") {
      if (key == "ratings_file") cfg.ratings_file = resolve(base, value);
      else if (key == "movies_file") cfg.movies_file = resolve(base, value);
      else if (key == "links_file") cfg.links_file = resolve(base, value);
      else if (key == "countries_file") cfg.countries_file = resolve(base, value);
      else if (key == "parse_mode") parse_mode = value;
      else c.add(qual + ": unknown key");
    } else if (section == "filters") {
      if (key == "top_fraction") c.set_double(cfg.filters.top_fraction, qual, value);
      else if (key == "min_user_ratings") c.set_u32(cfg.filters.min_user_ratings, qual, value);
      else c.add(qual + ": unknown key");
    } else if (section == "split") {
      if (key == "test_fraction") c.set_double(cfg.split.test_fraction, qual, value);
      else if (key == "positive_threshold") c.set_int(cfg.split.positive_threshold, qual, value);
      else if (key == "seed") c.set_u64(cfg.split.seed, qual, value);
      else c.add(qual + ": unknown key");
    } else if (section == "walks") {
      if (key == "walks_per_entity") c.set_u32(cfg.walks.walks_per_entity, qual, value);
      else if (key == "depth") c.set_u32(cfg.walks.depth, qual, value);
      else if (key == "seed") c.set_u64(cfg.walks.seed, qual, value);
      else if (key == "scope") walk_scope = value;
      else if (key == "compress") c.set_bool(cfg.compress_walks, qual, value);
      else c.add(qual + ": unknown key");
    } else if (section == "training") {
      if (key == "dimension") c.set_u32(cfg.training.dimension, qual, value);
      else if (key == "window") c.set_u32(cfg.training.window, qual, value);
      else if (key == "epochs") c.set_u32(cfg.training.epochs, qual, value);
      else if (key == "negative_samples") c.set_u32(cfg.training.negative_samples, qual, value);
      else if (key == "learning_rate") c.set_double(cfg.training.learning_rate, qual, value);
      else if (key == "min_learning_rate") c.set_double(cfg.training.min_learning_rate, qual, value);
      else if (key == "min_count") c.set_u32(cfg.training.min_count, qual, value);
      else if (key == "subsample") c.set_double(cfg.training.subsample, qual, value);
      else if (key == "seed") c.set_u64(cfg.training.seed, qual, value);
      else c.add(qual + ": unknown key");
    } else if (section == "recommend") {
      if (key == "top_n") c.set_u32(cfg.top_n, qual, value);
      else if (key == "neighbors") c.set_u32(cfg.neighbors, qual, value);
      else c.add(qual + ": unknown key");
    } else if (section == "bias") {
      if (key == "features") cfg.bias.features = split_list(value);
      else if (key == "top_values") c.set_u32(cfg.bias.top_values, qual, value);
      else if (key == "alpha") c.set_double(cfg.bias.alpha, qual, value);
      else if (key == "expected_basis") expected_basis = value;
      else c.add(qual + ": unknown key");
    } else if (section == "genre_runs") {
      if (key == "enabled") c.set_bool(cfg.genre_runs.enabled, qual, value);
      else if (key == "genres") cfg.genre_runs.genres = split_list(value);
      else c.add(qual + ": unknown key");
    } else if (section == "output") {
      if (key == "directory") cfg.output_dir = resolve(base, value);
      else if (key == "cache") c.set_bool(cfg.cache, qual, value);
      else c.add(qual + ": unknown key");
    }
  }

  if (parse_mode == "strict") cfg.parse_mode = ParseMode::Strict;
  else if (parse_mode == "lenient") cfg.parse_mode = ParseMode::Lenient;
  else c.add("[data] parse_mode: expected strict or lenient, got '" + parse_mode + "'");

  if (walk_scope == "items") cfg.walk_scope_items = true;
  else if (walk_scope == "all") cfg.walk_scope_items = false;
  else c.add("[walks] scope: expected items or all, got '" + walk_scope + "'");

  if (expected_basis == "catalog") cfg.bias.rating_weighted = false;
  else if (expected_basis == "ratings") cfg.bias.rating_weighted = true;
  else c.add("[bias] expected_basis: expected catalog or ratings, got '" +
             expected_basis + "'");

  if (cfg.ratings_file.empty()) c.add("[data] ratings_file is required");
  if (cfg.movies_file.empty()) c.add("[data] movies_file is required");
  if (cfg.links_file.empty()) c.add("[data] links_file is required");
  check_file(c, "[data] ratings_file", cfg.ratings_file);
  check_file(c, "[data] movies_file", cfg.movies_file);
  check_file(c, "[data] links_file", cfg.links_file);
  check_file(c, "[data] countries_file", cfg.countries_file);

  if (cfg.kgs.empty()) c.add("at least one [kg.<label>] section is required");
  for (const auto& kg : cfg.kgs) {
    if (kg.files.empty())
      c.add("[kg." + kg.label + "] files is required");
    for (const auto& f : kg.files)
      check_file(c, "[kg." + kg.label + "] files", f);
  }

  if (cfg.walks.walks_per_entity < 1)
    c.add("[walks] walks_per_entity must be at least 1");
  if (cfg.walks.depth < 1) c.add("[walks] depth must be at least 1");

  try {
    cfg.training.validate();
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) c.add("[training] " + p);
  }
  try {
    cfg.split.validate();
  } catch (const ValidationError& e) {
    for (const auto& p : e.problems()) c.add("[split] " + p);
  }

  if (!(cfg.filters.top_fraction >= 0.0 && cfg.filters.top_fraction < 1.0))
    c.add("[filters] top_fraction must be in [0, 1)");
  if (cfg.top_n < 1) c.add("[recommend] top_n must be at least 1");

  for (const auto& f : cfg.bias.features)
    if (f != "country" && f != "genre")
      c.add("[bias] features: unknown feature '" + f +
            "' (expected country or genre)");
  if (!cfg.bias.features.empty()) {
    if (cfg.kgs.size() < 2)
      c.add("[bias] features need at least two [kg.<label>] sections");
    if (cfg.bias.top_values < 2)
      c.add("[bias] top_values must be at least 2");
    if (!(cfg.bias.alpha > 0.0 && cfg.bias.alpha < 1.0))
      c.add("[bias] alpha must be in (0, 1)");
  }
  bool wants_country =
      std::find(cfg.bias.features.begin(), cfg.bias.features.end(),
                "country") != cfg.bias.features.end();
  if (wants_country && cfg.countries_file.empty())
    c.add("[data] countries_file is required for the country feature");

  if (cfg.output_dir.empty()) c.add("[output] directory must not be empty");

  if (!c.problems.empty()) throw ValidationError(std::move(c.problems));
  return cfg;
}

std::string canonical_config_string(const ExperimentConfig& cfg) {
  std::string out;
  append_kv(out, "data.ratings_file", cfg.ratings_file);
  append_kv(out, "data.movies_file", cfg.movies_file);
  append_kv(out, "data.links_file", cfg.links_file);
  append_kv(out, "data.countries_file", cfg.countries_file);
  append_kv(out, "data.parse_mode",
            cfg.parse_mode == ParseMode::Strict ? "strict" : "lenient");
  for (const auto& kg : cfg.kgs) {
    std::string files;
    for (std::size_t i = 0; i < kg.files.size(); ++i) {
      if (i) files.push_back(',');
      files += kg.files[i];
    }
    append_kv(out, "kg." + kg.label, files);
  }
  append_kv(out, "filters.top_fraction", fmt_double(cfg.filters.top_fraction));
  append_kv(out, "filters.min_user_ratings",
            std::to_string(cfg.filters.min_user_ratings));
  append_kv(out, "split.test_fraction", fmt_double(cfg.split.test_fraction));
  append_kv(out, "split.positive_threshold",
            std::to_string(cfg.split.positive_threshold));
  append_kv(out, "split.seed", std::to_string(cfg.split.seed));
  append_kv(out, "walks.walks_per_entity",
            std::to_string(cfg.walks.walks_per_entity));
  append_kv(out, "walks.depth", std::to_string(cfg.walks.depth));
  append_kv(out, "walks.seed", std::to_string(cfg.walks.seed));
  append_kv(out, "walks.scope", cfg.walk_scope_items ? "items" : "all");
  append_kv(out, "walks.compress", cfg.compress_walks ? "true" : "false");
  append_kv(out, "training.dimension", std::to_string(cfg.training.dimension));
  append_kv(out, "training.window", std::to_string(cfg.training.window));
  append_kv(out, "training.epochs", std::to_string(cfg.training.epochs));
  append_kv(out, "training.negative_samples",
            std::to_string(cfg.training.negative_samples));
  append_kv(out, "training.learning_rate", fmt_double(cfg.training.learning_rate));
  append_kv(out, "training.min_learning_rate",
            fmt_double(cfg.training.min_learning_rate));
  append_kv(out, "training.min_count", std::to_string(cfg.training.min_count));
  append_kv(out, "training.subsample", fmt_double(cfg.training.subsample));
  append_kv(out, "training.seed", std::to_string(cfg.training.seed));
  append_kv(out, "recommend.top_n", std::to_string(cfg.top_n));
  append_kv(out, "recommend.neighbors", std::to_string(cfg.neighbors));
  std::string feats;
  for (std::size_t i = 0; i < cfg.bias.features.size(); ++i) {
    if (i) feats.push_back(',');
    feats += cfg.bias.features[i];
  }
  append_kv(out, "bias.features", feats);
  append_kv(out, "bias.top_values", std::to_string(cfg.bias.top_values));
  append_kv(out, "bias.alpha", fmt_double(cfg.bias.alpha));
  append_kv(out, "bias.expected_basis",
            cfg.bias.rating_weighted ? "ratings" : "catalog");
  append_kv(out, "genre_runs.enabled", cfg.genre_runs.enabled ? "true" : "false");
  std::string genres;
  for (std::size_t i = 0; i < cfg.genre_runs.genres.size(); ++i) {
    if (i) genres.push_back(',');
    genres += cfg.genre_runs.genres[i];
  }
  append_kv(out, "genre_runs.genres", genres);
  append_kv(out, "output.cache", cfg.cache ? "true" : "false");
  return out;
}

}  // namespace kgrec
