#include "kgrec/walker.hpp"

#include <algorithm>
#include <thread>
#include <unordered_set>

#include "kgrec/error.hpp"
#include "kgrec/rng.hpp"

namespace kgrec {

namespace {

void validate(const KnowledgeGraph& g, const WalkConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.walks_per_entity < 1)
    problems.push_back("walks_per_entity must be >= 1");
  if (cfg.depth < 1) problems.push_back("depth must be >= 1");
  if (cfg.scope && cfg.scope->empty())
    problems.push_back("entity scope is empty");
  if (!cfg.scope && g.node_count() == 0)
    problems.push_back("graph has no nodes to walk from");
  if (cfg.scope)
    for (auto id : *cfg.scope)
      if (id >= g.node_count()) {
        problems.push_back("scope references unknown node id " +
                           std::to_string(id));
        break;
      }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

void walk_entity(const KnowledgeGraph& g, const WalkConfig& cfg,
                 std::uint32_t entity, Walk* out) {
  SplitMix64 rng = stream_for(cfg.seed, entity);
  for (std::uint32_t w = 0; w < cfg.walks_per_entity; ++w) {
    Walk& walk = out[w];
    walk.tokens.clear();
    walk.tokens.reserve(2 * cfg.depth + 1);
    walk.tokens.push_back(entity);
    std::uint32_t cur = entity;
    for (std::uint32_t hop = 0; hop < cfg.depth; ++hop) {
      auto edges = g.out_edges(cur);
      if (edges.empty()) break;
      const Edge& e = edges[rng.bounded(edges.size())];
      walk.tokens.push_back(e.predicate);
      walk.tokens.push_back(e.target);
      cur = e.target;
    }
  }
}

}  // namespace

WalkCorpus generate_walks(const KnowledgeGraph& g, const WalkConfig& cfg,
                          unsigned threads) {
  validate(g, cfg);
  WalkCorpus corpus;
  corpus.kg = g.name();
  corpus.config = cfg;
  if (cfg.scope) {
    corpus.starts = *cfg.scope;
    std::sort(corpus.starts.begin(), corpus.starts.end());
    corpus.starts.erase(
        std::unique(corpus.starts.begin(), corpus.starts.end()),
        corpus.starts.end());
  } else {
    corpus.starts.resize(g.node_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i) corpus.starts[i] = i;
  }

  corpus.walks.resize(static_cast<std::size_t>(corpus.starts.size()) *
                      cfg.walks_per_entity);
  std::size_t n = corpus.starts.size();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i)
      walk_entity(g, cfg, corpus.starts[i],
                  corpus.walks.data() + i * cfg.walks_per_entity);
  } else {
    unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned tid = 0; tid < t; ++tid) {
      pool.emplace_back([&, tid] {
        for (std::size_t i = tid; i < n; i += t)
          walk_entity(g, cfg, corpus.starts[i],
                      corpus.walks.data() + i * cfg.walks_per_entity);
      });
    }
    for (auto& th : pool) th.join();
  }
  return corpus;
}

CorpusStats corpus_stats(const KnowledgeGraph& g, const WalkCorpus& c) {
  CorpusStats st;
  st.walks = c.walks.size();
  std::uint64_t full = 2 * static_cast<std::uint64_t>(c.config.depth) + 1;
  std::uint64_t truncated = 0;
  std::unordered_set<std::string_view> distinct;
  for (std::size_t w = 0; w < c.walks.size(); ++w) {
    const auto& tokens = c.walks[w].tokens;
    st.tokens += tokens.size();
    if (tokens.size() < full) ++truncated;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& s = (i % 2 == 0) ? g.node_token(tokens[i])
                                          : g.predicate_token(tokens[i]);
      distinct.insert(std::string_view(s));
    }
  }
  st.distinct_tokens = distinct.size();
  st.truncated_fraction =
      st.walks ? static_cast<double>(truncated) / static_cast<double>(st.walks)
               : 0.0;
  return st;
}

void write_corpus(const KnowledgeGraph& g, const WalkCorpus& c,
                  const std::string& path) {
  LineSink sink(path);
  std::string line;
  for (const Walk& w : c.walks) {
    line.clear();
    for (std::size_t i = 0; i < w.tokens.size(); ++i) {
      if (i) line.push_back(' ');
      line += (i % 2 == 0) ? g.node_token(w.tokens[i])
                           : g.predicate_token(w.tokens[i]);
    }
    sink.write(line);
  }
  sink.close();
}

std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
  LineSource src(path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (src.next(line)) {
    if (line.empty()) continue;
    std::vector<std::string> tokens;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ' ') {
        if (i > start) tokens.emplace_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  return sentences;
}

std::vector<std::vector<std::string>> corpus_sentences(const KnowledgeGraph& g,
                                                       const WalkCorpus& c) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(c.walks.size());
  for (const Walk& w : c.walks) {
    std::vector<std::string> tokens;
    tokens.reserve(w.tokens.size());
    for (std::size_t i = 0; i < w.tokens.size(); ++i)
      tokens.push_back((i % 2 == 0) ? g.node_token(w.tokens[i])
                                    : g.predicate_token(w.tokens[i]));
    sentences.push_back(std::move(tokens));
  }
  return sentences;
}

}  // namespace kgrec
