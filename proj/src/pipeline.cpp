#include "kgrec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <tuple>

#include <json.hpp>

#include "kgrec/alignment.hpp"
#include "kgrec/bias.hpp"
#include "kgrec/digest.hpp"
#include "kgrec/error.hpp"
#include "kgrec/graph.hpp"
#include "kgrec/gzio.hpp"
#include "kgrec/log.hpp"
#include "kgrec/metrics.hpp"
#include "kgrec/ntriples.hpp"
#include "kgrec/recommender.hpp"
#include "kgrec/sgns.hpp"
#include "kgrec/split.hpp"
#include "kgrec/tables.hpp"
#include "kgrec/version.hpp"
#include "kgrec/walker.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace kgrec {

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

void write_dataset_tsv(const RatingsDataset& d, const std::string& path) {
  LineSink out(path);
  char buf[128];
  for (const auto& r : d.ratings) {
    std::snprintf(buf, sizeof buf, "%lld\t%lld\t%d\t%lld",
                  static_cast<long long>(r.user), static_cast<long long>(r.item),
                  r.value, static_cast<long long>(r.timestamp));
    out.write(buf);
  }
  out.close();
}

RatingsDataset read_dataset_tsv(const std::string& path,
                                std::map<std::int64_t, ItemMeta> items) {
  RatingsDataset d;
  d.items = std::move(items);
  LineSource src(path);
  std::string line;
  while (src.next(line)) {
    Rating r{};
    long long user = 0, item = 0, ts = 0;
    if (std::sscanf(line.c_str(), "%lld\t%lld\t%d\t%lld", &user, &item, &r.value,
                    &ts) != 4)
      throw ParseError(path + ":" + std::to_string(src.line_number()) +
                           ": bad rating row",
                       src.line_number());
    r.user = user;
    r.item = item;
    r.timestamp = ts;
    d.ratings.push_back(r);
  }
  d.provenance.push_back("cache " + path);
  return d;
}

std::string join_set(const std::set<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out.push_back('|');
    out += v;
  }
  return out;
}

std::set<std::string> split_bar(const std::string& s) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t bar = s.find('|', pos);
    if (bar == std::string::npos) bar = s.size();
    if (bar > pos) out.insert(s.substr(pos, bar - pos));
    pos = bar + 1;
  }
  return out;
}

void write_catalog_tsv(const std::map<std::int64_t, ItemMeta>& items,
                       const std::map<std::int64_t, std::uint64_t>& counts,
                       const std::string& path) {
  LineSink out(path);
  out.write("item_id\ttitle\tgenres\tcountries\trating_count");
  for (const auto& [id, meta] : items) {
    std::uint64_t n = 0;
    if (auto it = counts.find(id); it != counts.end()) n = it->second;
    out.write(std::to_string(id) + "\t" + meta.title + "\t" +
              join_set(meta.genres) + "\t" + join_set(meta.countries) + "\t" +
              std::to_string(n));
  }
  out.close();
}

void read_catalog_tsv(const std::string& path,
                      std::map<std::int64_t, ItemMeta>& items,
                      std::map<std::int64_t, std::uint64_t>& counts) {
  LineSource src(path);
  std::string line;
  if (!src.next(line) || line != "item_id\ttitle\tgenres\tcountries\trating_count")
    throw ParseError(path + ": missing catalog header");
  while (src.next(line)) {
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) tab = line.size();
      cols.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (cols.size() != 5)
      throw ParseError(path + ":" + std::to_string(src.line_number()) +
                           ": expected 5 columns",
                       src.line_number());
    std::int64_t id = std::stoll(cols[0]);
    ItemMeta meta;
    meta.title = cols[1];
    meta.genres = split_bar(cols[2]);
    meta.countries = split_bar(cols[3]);
    items.emplace(id, std::move(meta));
    counts[id] = std::stoull(cols[4]);
  }
}

// Shared by the main recommend stage and the per-genre grid.
std::vector<Recommendation> recommend_all(
    const EmbeddingSpace& space, const AlignmentMap& alignment,
    const std::string& kg, const RatingsDataset& train,
    std::size_t top_n, std::uint32_t neighbors, unsigned threads) {
  std::vector<std::int64_t> catalog;
  catalog.reserve(train.items.size());
  for (const auto& [id, meta] : train.items) catalog.push_back(id);

  ItemVectorIndex idx = ItemVectorIndex::build(space, alignment, kg, catalog);
  if (!idx.missing().empty())
    log_warn(kg + ": " + std::to_string(idx.missing().size()) +
             " catalog items have no embedding vector and cannot be scored");
  if (idx.items().empty())
    throw DomainError(kg + ": no catalog item has an embedding vector");

  std::size_t k = idx.items().size() - 1;
  if (neighbors > 0) k = std::min<std::size_t>(neighbors, k);
  SimilarityTable table = SimilarityTable::build(idx, k, threads);

  std::vector<Recommendation> recs;
  const auto& rows = train.ratings;
  std::size_t i = 0;
  while (i < rows.size()) {
    UserProfile u;
    u.user = rows[i].user;
    while (i < rows.size() && rows[i].user == u.user) {
      u.ratings.emplace_back(rows[i].item, double(rows[i].value));
      ++i;
    }
    std::vector<std::int64_t> rated;
    rated.reserve(u.ratings.size());
    for (const auto& [item, value] : u.ratings) rated.push_back(item);
    std::vector<std::int64_t> candidates;
    std::set_difference(idx.items().begin(), idx.items().end(), rated.begin(),
                        rated.end(), std::back_inserter(candidates));
    Recommendation rec = recommend_top_n(u, top_n, table, candidates);
    for (const auto& s : rec.items)
      if (std::binary_search(rated.begin(), rated.end(), s.item))
        throw DomainError(kg + ": recommended an item user " +
                          std::to_string(u.user) + " already rated");
    recs.push_back(std::move(rec));
  }
  return recs;
}

constexpr const char* kStageOrder[] = {
    "prepare", "ingest", "walk",       "embed",  "recommend",
    "eval",    "bias",   "genre-grid", "report",
};

int stage_rank(const std::string& name) {
  for (int i = 0; i < int(std::size(kStageOrder)); ++i)
    if (name == kStageOrder[i]) return i;
  throw ValidationError("unknown stage '" + name + "'");
}

class PipelineRun {
 public:
  PipelineRun(const ExperimentConfig& cfg, const RunOptions& opts)
      : cfg_(cfg), opts_(opts), out_(cfg.output_dir) {
    fs::create_directories(out_ / "cache");
    cur_.tool_version = kToolVersion;
    cur_.config_digest = sha256_hex(canonical_config_string(cfg_));
    cur_.deterministic = opts_.deterministic;
    load_prev_manifest();
  }

  RunManifest run(int last_rank) {
    stage_prepare();
    if (last_rank >= stage_rank("ingest"))
      for (const auto& kg : cfg_.kgs) stage_ingest(kg.label);
    if (last_rank >= stage_rank("walk"))
      for (const auto& kg : cfg_.kgs) stage_walk(kg.label);
    if (last_rank >= stage_rank("embed"))
      for (const auto& kg : cfg_.kgs) stage_embed(kg.label);
    if (last_rank >= stage_rank("recommend"))
      for (const auto& kg : cfg_.kgs) stage_recommend(kg.label);
    if (last_rank >= stage_rank("eval")) stage_eval();
    if (last_rank >= stage_rank("bias"))
      for (const auto& feature : cfg_.bias.features) stage_bias(feature);
    if (last_rank >= stage_rank("genre-grid") && cfg_.genre_runs.enabled)
      stage_genre_grid();
    if (last_rank >= stage_rank("report")) stage_report();
    write_manifest();
    warn_untracked();
    return cur_;
  }

 private:
  const ExperimentConfig& cfg_;
  RunOptions opts_;
  fs::path out_;
  bool have_prev_ = false;
  RunManifest prev_;
  RunManifest cur_;

  // Products this run has in memory; anything absent is reloaded from its
  // cached artifact on demand.
  std::optional<SplitResult> data_;
  std::optional<RatingsDataset> full_;  // filtered dataset before the split
  std::map<std::int64_t, std::uint64_t> rating_counts_;
  std::optional<AlignmentMap> alignment_;
  std::map<std::string, KnowledgeGraph> graphs_;
  std::map<std::string, Sentences> corpora_;
  std::map<std::string, EmbeddingSpace> spaces_;
  std::map<std::string, std::vector<Recommendation>> recs_;

  std::string abs(const std::string& rel) const { return (out_ / rel).string(); }

  std::string walks_rel(const std::string& kg) const {
    return "cache/walks-" + kg + (cfg_.compress_walks ? ".txt.gz" : ".txt");
  }

  void load_prev_manifest() {
    std::string path = abs("manifest.json");
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return;
    try {
      prev_ = manifest_from_json(read_text_file(path));
      have_prev_ = true;
    } catch (const std::exception& e) {
      log_warn("ignoring unreadable manifest " + path + ": " + e.what());
    }
  }

  const StageRecord* find_prev(const std::string& name,
                               const std::string& kg) const {
    for (const auto& s : prev_.stages)
      if (s.name == name && s.kg == kg) return &s;
    return nullptr;
  }

  std::string input_digest(const std::string& rel) const {
    auto it = cur_.artifact_digests.find(rel);
    if (it == cur_.artifact_digests.end())
      throw StageError("pipeline", "", "internal: no digest for " + rel, false);
    return it->second;
  }

  // Returns true on a cache hit. `exec` must write every artifact it lists.
  bool run_stage(const std::string& name, const std::string& kg,
                 const std::vector<std::string>& inputs,
                 const std::string& params,
                 const std::vector<std::string>& artifacts,
                 const std::function<void()>& exec) {
    std::string key_src = name + "|" + kg;
    for (const auto& in : inputs) key_src += "|" + in;
    key_src += "|" + params + "|" + kToolVersion;

    StageRecord rec;
    rec.name = name;
    rec.kg = kg;
    rec.stage_key = sha256_hex(key_src);
    rec.artifacts = artifacts;

    auto started = std::chrono::steady_clock::now();
    bool hit = false;
    if (cfg_.cache && have_prev_) {
      const StageRecord* p = find_prev(name, kg);
      if (p && p->stage_key == rec.stage_key && p->artifacts == artifacts) {
        hit = true;
        for (const auto& a : artifacts) {
          auto it = prev_.artifact_digests.find(a);
          std::error_code ec;
          if (it == prev_.artifact_digests.end() ||
              !fs::is_regular_file(abs(a), ec) ||
              sha256_file(abs(a)) != it->second) {
            hit = false;
            break;
          }
        }
      }
    }

    std::string label = kg.empty() ? name : name + "[" + kg + "]";
    if (hit) {
      log_info(label + ": cached");
      for (const auto& a : artifacts)
        cur_.artifact_digests[a] = prev_.artifact_digests.at(a);
    } else {
      log_info(label + ": running");
      try {
        exec();
      } catch (const StageError&) {
        throw;
      } catch (const IoError& e) {
        throw StageError(name, kg, e.what(), true);
      } catch (const std::exception& e) {
        throw StageError(name, kg, e.what(), false);
      }
      for (const auto& a : artifacts)
        cur_.artifact_digests[a] = sha256_file(abs(a));
    }

    rec.cached = hit;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                started)
                      .count();
    cur_.stages.push_back(std::move(rec));
    return hit;
  }

  std::vector<std::string> kg_labels() const {
    std::vector<std::string> labels;
    for (const auto& kg : cfg_.kgs) labels.push_back(kg.label);
    return labels;
  }

  // ---- lazy product loading ------------------------------------------------

  const AlignmentMap& ensure_alignment() {
    if (!alignment_) alignment_ = load_alignment(cfg_.links_file);
    return *alignment_;
  }

  const SplitResult& ensure_data() {
    if (data_) return *data_;
    std::map<std::int64_t, ItemMeta> items;
    rating_counts_.clear();
    read_catalog_tsv(abs("cache/catalog.tsv"), items, rating_counts_);
    SplitResult sr;
    sr.train = read_dataset_tsv(abs("cache/train.tsv"), items);
    sr.test = read_dataset_tsv(abs("cache/test.tsv"), std::move(items));
    data_ = std::move(sr);
    return *data_;
  }

  const RatingsDataset& ensure_full() {
    if (full_) return *full_;
    const SplitResult& sr = ensure_data();
    RatingsDataset d;
    d.items = sr.train.items;
    d.ratings.reserve(sr.train.ratings.size() + sr.test.ratings.size());
    std::merge(sr.train.ratings.begin(), sr.train.ratings.end(),
               sr.test.ratings.begin(), sr.test.ratings.end(),
               std::back_inserter(d.ratings), [](const Rating& a, const Rating& b) {
                 return std::tie(a.user, a.item) < std::tie(b.user, b.item);
               });
    d.provenance.push_back("merged train+test halves");
    full_ = std::move(d);
    return *full_;
  }

  const KnowledgeGraph& ensure_graph(const std::string& kg) {
    auto it = graphs_.find(kg);
    if (it == graphs_.end())
      it = graphs_.emplace(kg, KnowledgeGraph::load(abs("cache/graph-" + kg + ".bin")))
               .first;
    return it->second;
  }

  const Sentences& ensure_corpus(const std::string& kg) {
    auto it = corpora_.find(kg);
    if (it == corpora_.end())
      it = corpora_.emplace(kg, read_corpus(abs(walks_rel(kg)))).first;
    return it->second;
  }

  const EmbeddingSpace& ensure_space(const std::string& kg) {
    auto it = spaces_.find(kg);
    if (it == spaces_.end())
      it = spaces_.emplace(kg, read_embeddings(abs("vectors-" + kg + ".txt"))).first;
    return it->second;
  }

  const std::vector<Recommendation>& ensure_recs(const std::string& kg) {
    auto it = recs_.find(kg);
    if (it == recs_.end())
      it = recs_.emplace(kg, read_recommendations(abs("recs-" + kg + ".tsv"))).first;
    return it->second;
  }

  // ---- stages --------------------------------------------------------------

  void stage_prepare() {
    std::vector<std::string> inputs = {sha256_file(cfg_.ratings_file),
                                       sha256_file(cfg_.movies_file),
                                       sha256_file(cfg_.links_file)};
    if (!cfg_.countries_file.empty())
      inputs.push_back(sha256_file(cfg_.countries_file));
    std::string params =
        "top_fraction=" + fmt9(cfg_.filters.top_fraction) +
        " min_user_ratings=" + std::to_string(cfg_.filters.min_user_ratings) +
        " test_fraction=" + fmt9(cfg_.split.test_fraction) +
        " positive_threshold=" + std::to_string(cfg_.split.positive_threshold) +
        " seed=" + std::to_string(cfg_.split.seed) +
        " kgs=" + join(kg_labels(), ',');
    std::vector<std::string> artifacts = {
        "cache/train.tsv", "cache/test.tsv", "cache/catalog.tsv",
        "cache/filter_stages.csv"};

    run_stage("prepare", "", inputs, params, artifacts, [&] {
      RatingsDataset raw = load_movielens(cfg_.ratings_file, cfg_.movies_file);
      if (!cfg_.countries_file.empty())
        attach_countries(raw, cfg_.countries_file);
      const AlignmentMap& alignment = ensure_alignment();
      auto aligned_vec = alignment.complete_items(kg_labels());
      std::set<std::int64_t> aligned(aligned_vec.begin(), aligned_vec.end());
      FilterOutcome fo = apply_filters(raw, aligned, cfg_.filters);
      for (const auto& s : fo.stages)
        log_info("prepare: " + s.stage + ": " + std::to_string(s.movies) +
                 " movies, " + std::to_string(s.users) + " users, " +
                 std::to_string(s.ratings) + " ratings");

      rating_counts_ = fo.dataset.rating_counts_per_item();
      SplitResult sr = split_dataset(fo.dataset, cfg_.split);

      write_dataset_tsv(sr.train, abs("cache/train.tsv"));
      write_dataset_tsv(sr.test, abs("cache/test.tsv"));
      write_catalog_tsv(fo.dataset.items, rating_counts_, abs("cache/catalog.tsv"));

      Table t;
      t.name = "filter_stages";
      t.columns = {"stage", "movies", "users", "ratings"};
      for (const auto& s : fo.stages)
        t.rows.push_back({s.stage, std::to_string(s.movies),
                          std::to_string(s.users), std::to_string(s.ratings)});
      write_text_file(abs("cache/filter_stages.csv"), to_csv(t));

      full_ = std::move(fo.dataset);
      data_ = std::move(sr);
    });
  }

  void stage_ingest(const std::string& kg) {
    const KgSource* src = cfg_.find_kg(kg);
    std::vector<std::string> inputs;
    for (const auto& f : src->files) inputs.push_back(sha256_file(f));
    std::string params = std::string("parse_mode=") +
                         (cfg_.parse_mode == ParseMode::Strict ? "strict" : "lenient");
    std::string artifact = "cache/graph-" + kg + ".bin";

    run_stage("ingest", kg, inputs, params, {artifact}, [&] {
      GraphBuilder builder(kg);
      std::uint64_t skipped = 0;
      for (const auto& f : src->files) {
        ParseStats st = parse_ntriples_file(f, cfg_.parse_mode,
                                            [&](Triple&& t) { builder.add(t); });
        skipped += st.skipped;
        for (const auto& issue : st.issues)
          log_warn(kg + ": " + f + ":" + std::to_string(issue.line) + ": " +
                   issue.reason);
      }
      KnowledgeGraph g = std::move(builder).build();
      log_info(kg + ": " + std::to_string(g.node_count()) + " nodes, " +
               std::to_string(g.stats().triples) + " triples, " +
               std::to_string(skipped) + " skipped lines");
      g.save(abs(artifact));
      graphs_.insert_or_assign(kg, std::move(g));
    });
  }

  void stage_walk(const std::string& kg) {
    std::vector<std::string> inputs = {input_digest("cache/graph-" + kg + ".bin")};
    if (cfg_.walk_scope_items) {
      inputs.push_back(input_digest("cache/catalog.tsv"));
      inputs.push_back(sha256_file(cfg_.links_file));
    }
    std::string params =
        "walks_per_entity=" + std::to_string(cfg_.walks.walks_per_entity) +
        " depth=" + std::to_string(cfg_.walks.depth) +
        " seed=" + std::to_string(cfg_.walks.seed) +
        " scope=" + (cfg_.walk_scope_items ? "items" : "all");
    std::string artifact = walks_rel(kg);

    run_stage("walk", kg, inputs, params, {artifact}, [&] {
      const KnowledgeGraph& g = ensure_graph(kg);
      WalkConfig wc = cfg_.walks;
      if (cfg_.walk_scope_items) {
        const SplitResult& sr = ensure_data();
        const AlignmentMap& alignment = ensure_alignment();
        std::vector<std::uint32_t> scope;
        for (const auto& [item, meta] : sr.train.items) {
          const std::string* token = alignment.find(item, kg);
          if (!token) continue;
          if (auto id = g.find_node(*token)) scope.push_back(*id);
        }
        if (scope.empty())
          throw DomainError("no catalog item resolves to a node in KG " + kg);
        wc.scope = std::move(scope);
      }
      WalkCorpus corpus = generate_walks(g, wc, opts_.threads);
      CorpusStats st = corpus_stats(g, corpus);
      log_info(kg + ": " + std::to_string(st.walks) + " walks, " +
               std::to_string(st.distinct_tokens) + " distinct tokens, " +
               fmt6(st.truncated_fraction) + " truncated");
      write_corpus(g, corpus, abs(artifact));
      corpora_[kg] = corpus_sentences(g, corpus);
    });
  }

  void stage_embed(const std::string& kg) {
    std::vector<std::string> inputs = {input_digest(walks_rel(kg))};
    const TrainParams& p = cfg_.training;
    std::string params =
        "dimension=" + std::to_string(p.dimension) +
        " window=" + std::to_string(p.window) +
        " epochs=" + std::to_string(p.epochs) +
        " negative_samples=" + std::to_string(p.negative_samples) +
        " learning_rate=" + fmt9(p.learning_rate) +
        " min_learning_rate=" + fmt9(p.min_learning_rate) +
        " min_count=" + std::to_string(p.min_count) +
        " subsample=" + fmt9(p.subsample) + " seed=" + std::to_string(p.seed) +
        " deterministic=" + (opts_.deterministic ? "true" : "false");
    std::string artifact = "vectors-" + kg + ".txt";

    run_stage("embed", kg, inputs, params, {artifact}, [&] {
      TrainParams tp = cfg_.training;
      tp.deterministic = opts_.deterministic;
      tp.threads = opts_.threads;
      TrainResult r = train(ensure_corpus(kg), tp, kg);
      for (std::size_t e = 0; e < r.epoch_mean_loss.size(); ++e)
        log_info(kg + ": epoch " + std::to_string(e + 1) +
                 " mean loss " + fmt6(r.epoch_mean_loss[e]));
      write_embeddings(r.space, abs(artifact));
      spaces_.insert_or_assign(kg, std::move(r.space));
    });
  }

  void stage_recommend(const std::string& kg) {
    std::vector<std::string> inputs = {
        input_digest("vectors-" + kg + ".txt"),
        input_digest("cache/train.tsv"),
        input_digest("cache/catalog.tsv"),
        sha256_file(cfg_.links_file),
    };
    std::string params = "top_n=" + std::to_string(cfg_.top_n) +
                         " neighbors=" + std::to_string(cfg_.neighbors);
    std::string artifact = "recs-" + kg + ".tsv";

    run_stage("recommend", kg, inputs, params, {artifact}, [&] {
      const SplitResult& sr = ensure_data();
      auto recs = recommend_all(ensure_space(kg), ensure_alignment(), kg,
                                sr.train, cfg_.top_n, cfg_.neighbors,
                                opts_.threads);
      write_recommendations(recs, abs(artifact));
      recs_.insert_or_assign(kg, std::move(recs));
    });
  }

  void stage_eval() {
    std::vector<std::string> inputs;
    for (const auto& kg : cfg_.kgs)
      inputs.push_back(input_digest("recs-" + kg.label + ".tsv"));
    inputs.push_back(input_digest("cache/test.tsv"));
    std::string params =
        "top_n=" + std::to_string(cfg_.top_n) +
        " positive_threshold=" + std::to_string(cfg_.split.positive_threshold);

    run_stage("eval", "", inputs, params, {"eval.csv"}, [&] {
      const SplitResult& sr = ensure_data();
      std::vector<EvalReport> reports;
      for (const auto& kg : cfg_.kgs)
        reports.push_back(precision_recall_f1(ensure_recs(kg.label), sr.test,
                                              cfg_.split.positive_threshold,
                                              cfg_.top_n, kg.label));
      std::sort(reports.begin(), reports.end(),
                [](const EvalReport& a, const EvalReport& b) {
                  if (a.f1 != b.f1) return a.f1 > b.f1;
                  return a.kg < b.kg;
                });
      Table t;
      t.name = "eval";
      t.columns = {"kg", "precision", "recall", "f1", "users"};
      for (const auto& r : reports)
        t.rows.push_back({r.kg, fmt6(r.precision), fmt6(r.recall), fmt6(r.f1),
                          std::to_string(r.users_evaluated)});
      write_text_file(abs("eval.csv"), to_csv(t));
    });
  }

  void stage_bias(const std::string& feature) {
    std::vector<std::string> inputs = {input_digest("cache/catalog.tsv")};
    for (const auto& kg : cfg_.kgs)
      inputs.push_back(input_digest("recs-" + kg.label + ".tsv"));
    std::string params =
        "feature=" + feature +
        " top_values=" + std::to_string(cfg_.bias.top_values) +
        " alpha=" + fmt9(cfg_.bias.alpha) +
        " basis=" + (cfg_.bias.rating_weighted ? "ratings" : "catalog");
    std::string csv_rel = "bias-" + feature + ".csv";
    std::string json_rel = "bias-" + feature + ".json";

    run_stage("bias", feature, inputs, params, {csv_rel, json_rel}, [&] {
      const SplitResult& sr = ensure_data();
      std::map<std::int64_t, std::set<std::string>> assignment;
      std::vector<std::int64_t> catalog;
      for (const auto& [id, meta] : sr.train.items) {
        catalog.push_back(id);
        assignment[id] = (feature == "country") ? meta.countries : meta.genres;
      }
      CategoricalFeature f =
          make_top_feature(feature, assignment, cfg_.bias.top_values);

      std::map<std::string, double> expected =
          cfg_.bias.rating_weighted
              ? expected_fractions_weighted(catalog, f, rating_counts_)
              : expected_fractions(catalog, f);

      std::map<std::string, std::vector<std::int64_t>> recommended;
      for (const auto& kg : cfg_.kgs) {
        auto& flat = recommended[kg.label];
        for (const auto& rec : ensure_recs(kg.label))
          for (const auto& s : rec.items) flat.push_back(s.item);
      }

      BiasReport rep =
          make_bias_report(feature, f, recommended, expected, cfg_.bias.alpha);

      Table t;
      t.name = "bias-" + feature;
      t.columns = {"value", "c_e"};
      for (const auto& kg : cfg_.kgs) t.columns.push_back("p-" + kg.label);
      for (const auto& v : rep.values) {
        std::vector<std::string> row = {v, fmt6(rep.expected.at(v))};
        for (const auto& kg : cfg_.kgs)
          row.push_back(fmt6(rep.p.at(kg.label).at(v)));
        t.rows.push_back(std::move(row));
      }
      write_text_file(abs(csv_rel), to_csv(t));

      json j;
      j["feature"] = rep.feature;
      j["values"] = rep.values;
      j["kgs"] = rep.kgs;
      j["counts"] = rep.counts;
      j["totals"] = rep.totals;
      j["p"] = rep.p;
      j["expected"] = rep.expected;
      j["chi2"] = {{"per_kg", rep.chi2.per_kg}, {"sum", rep.chi2.sum}};
      j["verdict"] = {{"df", rep.verdict.df},
                      {"alpha", rep.verdict.alpha},
                      {"p_value", rep.verdict.p_value},
                      {"significant", rep.verdict.significant}};
      j["contingency"] = {{"chi2", rep.contingency_chi2},
                          {"p_value", rep.contingency_p_value}};
      write_text_file(abs(json_rel), j.dump(2) + "\n");

      log_info("bias[" + feature + "]: chi2 sum " + fmt6(rep.chi2.sum) +
               ", p " + fmt9(rep.verdict.p_value) +
               (rep.verdict.significant ? " (significant)" : " (not significant)"));
    });
  }

  void stage_genre_grid() {
    std::vector<std::string> inputs = {input_digest("cache/catalog.tsv"),
                                       input_digest("cache/train.tsv"),
                                       input_digest("cache/test.tsv"),
                                       sha256_file(cfg_.links_file)};
    for (const auto& kg : cfg_.kgs)
      inputs.push_back(input_digest("vectors-" + kg.label + ".txt"));
    std::string params =
        "test_fraction=" + fmt9(cfg_.split.test_fraction) +
        " positive_threshold=" + std::to_string(cfg_.split.positive_threshold) +
        " seed=" + std::to_string(cfg_.split.seed) +
        " top_n=" + std::to_string(cfg_.top_n) +
        " neighbors=" + std::to_string(cfg_.neighbors) +
        " genres=" + join(cfg_.genre_runs.genres, ',');

    run_stage("genre-grid", "", inputs, params, {"genre-f1.csv"}, [&] {
      const RatingsDataset& full = ensure_full();
      std::vector<std::string> genres = cfg_.genre_runs.genres;
      if (genres.empty()) {
        std::set<std::string> all;
        for (const auto& [id, meta] : full.items)
          all.insert(meta.genres.begin(), meta.genres.end());
        genres.assign(all.begin(), all.end());
      }

      Table t;
      t.name = "genre-f1";
      t.columns = {"genre"};
      for (const auto& kg : cfg_.kgs) t.columns.push_back(kg.label);

      for (const auto& genre : genres) {
        try {
          RatingsDataset part = genre_partition(full, genre);
          SplitResult sr = split_dataset(part, cfg_.split);
          std::vector<std::string> row = {genre};
          for (const auto& kg : cfg_.kgs) {
            auto recs = recommend_all(ensure_space(kg.label),
                                      ensure_alignment(), kg.label, sr.train,
                                      cfg_.top_n, cfg_.neighbors, opts_.threads);
            EvalReport r = precision_recall_f1(recs, sr.test,
                                               cfg_.split.positive_threshold,
                                               cfg_.top_n, kg.label);
            row.push_back(fmt6(r.f1));
          }
          t.rows.push_back(std::move(row));
        } catch (const DomainError& e) {
          log_warn("genre-grid: skipping '" + genre + "': " + e.what());
        }
      }
      if (t.rows.empty())
        throw DomainError("genre grid is empty: no genre produced an evaluable split");
      write_text_file(abs("genre-f1.csv"), to_csv(t));
    });
  }

  void stage_report() {
    fs::create_directories(out_ / "report");
    std::vector<std::string> sources = {"eval.csv"};
    for (const auto& feature : cfg_.bias.features)
      sources.push_back("bias-" + feature + ".csv");
    if (cfg_.genre_runs.enabled) sources.push_back("genre-f1.csv");

    std::vector<std::string> inputs, artifacts;
    for (const auto& s : sources) {
      inputs.push_back(input_digest(s));
      std::string base = s.substr(0, s.size() - 4);  // strip ".csv"
      artifacts.push_back("report/" + base + ".txt");
    }

    run_stage("report", "", inputs, "", artifacts, [&] {
      for (const auto& s : sources) {
        std::string base = s.substr(0, s.size() - 4);
        Table t = parse_csv(read_text_file(abs(s)), base);
        StarRule rule;
        if (base == "eval") {
          rule.kind = StarRule::ColMax;
          rule.first_col = 1;
          rule.last_col = 4;  // precision, recall, f1
        } else {
          rule.kind = StarRule::RowMax;
          rule.first_col = (base == "genre-f1") ? 1 : 2;  // KG columns
          rule.last_col = t.columns.size();
        }
        write_text_file(abs("report/" + base + ".txt"), render_text(t, rule));
      }
    });
  }

  void write_manifest() {
    write_text_file(abs("manifest.json"), manifest_to_json(cur_));
  }

  void warn_untracked() {
    for (const auto& entry : fs::recursive_directory_iterator(out_)) {
      if (!entry.is_regular_file()) continue;
      std::string rel = fs::relative(entry.path(), out_).generic_string();
      if (rel == "manifest.json") continue;
      if (!cur_.artifact_digests.count(rel))
        log_warn("untracked file in output directory: " + rel);
    }
  }
};

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["config_digest"] = m.config_digest;
  j["deterministic"] = m.deterministic;
  j["stages"] = json::array();
  for (const auto& s : m.stages) {
    j["stages"].push_back({{"name", s.name},
                           {"kg", s.kg},
                           {"stage_key", s.stage_key},
                           {"cached", s.cached},
                           {"seconds", s.seconds},
                           {"artifacts", s.artifacts}});
  }
  j["artifacts"] = m.artifact_digests;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.deterministic = j.at("deterministic").get<bool>();
    for (const auto& s : j.at("stages")) {
      StageRecord rec;
      rec.name = s.at("name").get<std::string>();
      rec.kg = s.at("kg").get<std::string>();
      rec.stage_key = s.at("stage_key").get<std::string>();
      rec.cached = s.at("cached").get<bool>();
      rec.seconds = s.at("seconds").get<double>();
      rec.artifacts = s.at("artifacts").get<std::vector<std::string>>();
      m.stages.push_back(std::move(rec));
    }
    m.artifact_digests =
        j.at("artifacts").get<std::map<std::string, std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
}

RunManifest run_pipeline(const ExperimentConfig& cfg, const RunOptions& opts) {
  PipelineRun run(cfg, opts);
  return run.run(stage_rank("report"));
}

RunManifest run_until(const ExperimentConfig& cfg, const std::string& last_stage,
                      const RunOptions& opts) {
  int rank = stage_rank(last_stage);
  PipelineRun run(cfg, opts);
  return run.run(rank);
}

RunManifest render_report(const ExperimentConfig& cfg) {
  fs::path out(cfg.output_dir);
  std::string manifest_path = (out / "manifest.json").string();
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec))
    throw ValidationError("no manifest at " + manifest_path +
                          "; run the pipeline first");
  RunManifest m = manifest_from_json(read_text_file(manifest_path));

  std::vector<std::string> sources = {"eval.csv"};
  for (const auto& feature : cfg.bias.features)
    sources.push_back("bias-" + feature + ".csv");
  if (cfg.genre_runs.enabled) sources.push_back("genre-f1.csv");
  for (const auto& s : sources)
    if (!fs::is_regular_file(out / s, ec))
      throw StageError("report", "", "missing artifact " + s, false);

  fs::create_directories(out / "report");
  for (const auto& s : sources) {
    std::string base = s.substr(0, s.size() - 4);
    Table t = parse_csv(read_text_file((out / s).string()), base);
    StarRule rule;
    if (base == "eval") {
      rule.kind = StarRule::ColMax;
      rule.first_col = 1;
      rule.last_col = 4;
    } else {
      rule.kind = StarRule::RowMax;
      rule.first_col = (base == "genre-f1") ? 1 : 2;
      rule.last_col = t.columns.size();
    }
    std::string rel = "report/" + base + ".txt";
    write_text_file((out / rel).string(), render_text(t, rule));
    m.artifact_digests[rel] = sha256_file((out / rel).string());
  }
  write_text_file(manifest_path, manifest_to_json(m));
  return m;
}

}  // namespace kgrec
