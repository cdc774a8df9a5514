#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgrec/graph.hpp"

namespace kgrec {

struct WalkConfig {
  std::uint32_t walks_per_entity = 500;
  std::uint32_t depth = 4;  // hops; a full walk has 2*depth+1 tokens
  std::uint64_t seed = 1;
  // Start entities (node ids). Empty optional = every node in the graph.
  std::optional<std::vector<std::uint32_t>> scope;
};

// Token ids alternate node, predicate, node, ... (odd length). A walk stops
// early at a node with no out-edges.
struct Walk {
  std::vector<std::uint32_t> tokens;
};

// Walks in canonical order: ascending start node id, then walk index.
// starts[i] owns walks [i*walks_per_entity, (i+1)*walks_per_entity).
struct WalkCorpus {
  std::string kg;
  WalkConfig config;
  std::vector<std::uint32_t> starts;
  std::vector<Walk> walks;
};

// Each walk samples a uniformly random out-edge per hop. The stream for a
// start entity depends only on (seed, entity id), so the corpus is identical
// for any thread count.
WalkCorpus generate_walks(const KnowledgeGraph& g, const WalkConfig& cfg,
                          unsigned threads = 1);

struct CorpusStats {
  std::uint64_t walks = 0;
  std::uint64_t tokens = 0;
  std::uint64_t distinct_tokens = 0;  // distinct token strings
  double truncated_fraction = 0;      // walks shorter than 2*depth+1 tokens
};

CorpusStats corpus_stats(const KnowledgeGraph& g, const WalkCorpus& c);

// One walk per line, token strings separated by single spaces. A ".gz"
// suffix compresses the file.
void write_corpus(const KnowledgeGraph& g, const WalkCorpus& c,
                  const std::string& path);

// Sentences of token strings, the shape the embedding trainer consumes.
std::vector<std::vector<std::string>> read_corpus(const std::string& path);
std::vector<std::vector<std::string>> corpus_sentences(const KnowledgeGraph& g,
                                                       const WalkCorpus& c);

}  // namespace kgrec
