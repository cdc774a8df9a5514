#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgrec/ntriples.hpp"

namespace kgrec {

// Token <-> dense id bijection. Ids are assigned in first-seen order.
// Tokens live in a deque so lookup views stay valid as the table grows.
class Interner {
 public:
  Interner() = default;
  // index_ holds views into tokens_; moves keep them valid, copies would not
  Interner(Interner&&) = default;
  Interner& operator=(Interner&&) = default;
  Interner(const Interner&) = delete;
  Interner& operator=(const Interner&) = delete;

  std::uint32_t intern(std::string_view token);
  std::optional<std::uint32_t> find(std::string_view token) const;
  const std::string& token(std::uint32_t id) const;  // throws LookupError
  std::uint32_t size() const { return static_cast<std::uint32_t>(tokens_.size()); }

 private:
  std::deque<std::string> tokens_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

struct Edge {
  std::uint32_t predicate;
  std::uint32_t target;
  auto operator<=>(const Edge&) const = default;
};

struct GraphStats {
  std::uint64_t triples = 0;          // accepted statements fed to the builder
  std::uint64_t literal_triples = 0;  // counted, but produce no edges
  std::uint64_t duplicate_edges = 0;  // exact (s,p,o) repeats collapsed
};

// Immutable directed multigraph over interned entity and predicate tokens.
// Literal-object statements contribute subject nodes and statistics only;
// adjacency holds exactly the IRI/blank-object edges, which is the ground
// truth the walk generator samples from.
class KnowledgeGraph {
 public:
  const std::string& name() const { return name_; }
  std::uint32_t node_count() const { return nodes_.size(); }
  std::uint32_t predicate_count() const { return predicates_.size(); }
  std::uint64_t edge_count() const { return edges_.size(); }
  const GraphStats& stats() const { return stats_; }

  // Deterministic stored order: sorted by (predicate id, target id).
  std::span<const Edge> out_edges(std::uint32_t node) const;  // throws LookupError

  const std::string& node_token(std::uint32_t id) const { return nodes_.token(id); }
  const std::string& predicate_token(std::uint32_t id) const {
    return predicates_.token(id);
  }
  std::optional<std::uint32_t> find_node(std::string_view token) const {
    return nodes_.find(token);
  }

  void save(const std::string& path) const;               // throws IoError
  static KnowledgeGraph load(const std::string& path);    // throws IoError

 private:
  friend class GraphBuilder;
  std::string name_;
  Interner nodes_;
  Interner predicates_;
  std::vector<std::uint64_t> offsets_;  // node_count + 1
  std::vector<Edge> edges_;
  GraphStats stats_;
};

// Accumulates statements and freezes them into a KnowledgeGraph. The result
// depends only on the set of distinct statements, not on their order, up to
// the id assignment (IRI-level adjacency is order-independent).
class GraphBuilder {
 public:
  explicit GraphBuilder(std::string name);
  void add(const Triple& t);
  KnowledgeGraph build() &&;

 private:
  std::uint32_t node_id(const Term& t);
  KnowledgeGraph g_;
  std::vector<std::vector<Edge>> adjacency_;
};

// Canonical corpus token for a node or subject/object term: the IRI text
// itself, or "_:label" for blank nodes (keeps the two namespaces disjoint).
std::string term_token(const Term& t);

}  // namespace kgrec
