#include "kgrec/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "kgrec/error.hpp"

namespace kgrec {

std::uint32_t Interner::intern(std::string_view token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  std::uint32_t id = static_cast<std::uint32_t>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(std::string_view(tokens_.back()), id);
  return id;
}

std::optional<std::uint32_t> Interner::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Interner::token(std::uint32_t id) const {
  if (id >= tokens_.size())
    throw LookupError("interned id out of range: " + std::to_string(id));
  return tokens_[id];
}

std::string term_token(const Term& t) {
  switch (t.kind) {
    case TermKind::Iri: return t.value;
    case TermKind::Blank: return "_:" + t.value;
    case TermKind::Literal: break;
  }
  throw DomainError("literals have no node token");
}

std::span<const Edge> KnowledgeGraph::out_edges(std::uint32_t node) const {
  if (node >= node_count())
    throw LookupError("unknown node id: " + std::to_string(node));
  return {edges_.data() + offsets_[node],
          static_cast<std::size_t>(offsets_[node + 1] - offsets_[node])};
}

GraphBuilder::GraphBuilder(std::string name) { g_.name_ = std::move(name); }

std::uint32_t GraphBuilder::node_id(const Term& t) {
  std::uint32_t id = g_.nodes_.intern(term_token(t));
  if (id >= adjacency_.size()) adjacency_.resize(id + 1);
  return id;
}

void GraphBuilder::add(const Triple& t) {
  ++g_.stats_.triples;
  std::uint32_t s = node_id(t.subject);
  if (t.object.kind == TermKind::Literal) {
    ++g_.stats_.literal_triples;
    return;
  }
  std::uint32_t p = g_.predicates_.intern(t.predicate);
  std::uint32_t o = node_id(t.object);
  adjacency_[s].push_back(Edge{p, o});
}

KnowledgeGraph GraphBuilder::build() && {
  adjacency_.resize(g_.nodes_.size());
  g_.offsets_.assign(g_.nodes_.size() + 1, 0);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    auto& edges = adjacency_[i];
    std::sort(edges.begin(), edges.end());
    std::size_t before = edges.size();
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g_.stats_.duplicate_edges += before - edges.size();
    g_.offsets_[i] = total;
    total += edges.size();
  }
  g_.offsets_[adjacency_.size()] = total;
  g_.edges_.reserve(total);
  for (auto& edges : adjacency_) {
    g_.edges_.insert(g_.edges_.end(), edges.begin(), edges.end());
    edges.clear();
    edges.shrink_to_fit();
  }
  adjacency_.clear();
  return std::move(g_);
}

namespace {

constexpr char kMagic[4] = {'K', 'G', 'R', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_str(std::ofstream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::string get_str(std::ifstream& in) {
  std::uint64_t n = get_u64(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

}  // namespace

void KnowledgeGraph::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create: " + path);
  out.write(kMagic, 4);
  put_str(out, name_);
  put_u64(out, stats_.triples);
  put_u64(out, stats_.literal_triples);
  put_u64(out, stats_.duplicate_edges);
  put_u32(out, node_count());
  for (std::uint32_t i = 0; i < node_count(); ++i) put_str(out, nodes_.token(i));
  put_u32(out, predicate_count());
  for (std::uint32_t i = 0; i < predicate_count(); ++i)
    put_str(out, predicates_.token(i));
  put_u64(out, edges_.size());
  for (std::uint64_t off : offsets_) put_u64(out, off);
  for (const Edge& e : edges_) {
    put_u32(out, e.predicate);
    put_u32(out, e.target);
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a graph snapshot: " + path);
  KnowledgeGraph g;
  g.name_ = get_str(in);
  g.stats_.triples = get_u64(in);
  g.stats_.literal_triples = get_u64(in);
  g.stats_.duplicate_edges = get_u64(in);
  std::uint32_t nodes = get_u32(in);
  for (std::uint32_t i = 0; i < nodes; ++i) g.nodes_.intern(get_str(in));
  std::uint32_t preds = get_u32(in);
  for (std::uint32_t i = 0; i < preds; ++i) g.predicates_.intern(get_str(in));
  std::uint64_t edge_count = get_u64(in);
  g.offsets_.resize(nodes + 1);
  for (auto& off : g.offsets_) off = get_u64(in);
  g.edges_.resize(edge_count);
  for (auto& e : g.edges_) {
    e.predicate = get_u32(in);
    e.target = get_u32(in);
  }
  if (!in) throw IoError("truncated graph snapshot: " + path);
  if (g.nodes_.size() != nodes || g.offsets_.back() != edge_count)
    throw IoError("corrupt graph snapshot: " + path);
  return g;
}

}  // namespace kgrec
