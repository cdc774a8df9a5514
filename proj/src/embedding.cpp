#include "kgrec/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "kgrec/error.hpp"
#include "kgrec/gzio.hpp"

namespace kgrec {

void TrainParams::validate() const {
  std::vector<std::string> problems;
  if (dimension < 1) problems.push_back("dimension must be >= 1");
  if (window < 1) problems.push_back("window must be >= 1");
  if (epochs < 1) problems.push_back("epochs must be >= 1");
  if (!(learning_rate > 0)) problems.push_back("learning_rate must be > 0");
  if (!(min_learning_rate > 0))
    problems.push_back("min_learning_rate must be > 0");
  if (min_learning_rate > learning_rate)
    problems.push_back("min_learning_rate must not exceed learning_rate");
  if (min_count < 1) problems.push_back("min_count must be >= 1");
  if (subsample < 0) problems.push_back("subsample must be >= 0");
  if (!deterministic && threads < 1)
    problems.push_back("threads must be >= 1");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

void EmbeddingSpace::rebuild_index() {
  index.clear();
  index.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    index.emplace(tokens[i], static_cast<std::int32_t>(i));
}

std::int32_t EmbeddingSpace::find(std::string_view token) const {
  auto it = index.find(std::string(token));
  return it == index.end() ? -1 : it->second;
}

std::span<const double> EmbeddingSpace::vector_of(std::int32_t row) const {
  if (row < 0 || static_cast<std::size_t>(row) >= tokens.size())
    throw LookupError("embedding row out of range: " + std::to_string(row));
  return {vectors.data() + static_cast<std::size_t>(row) * dim, dim};
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DomainError("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0 || nb <= 0) throw DomainError("cosine: zero-norm vector");
  double v = dot / (std::sqrt(na) * std::sqrt(nb));
  if (v > 1.0) v = 1.0;
  if (v < -1.0) v = -1.0;
  return v;
}

void write_embeddings(const EmbeddingSpace& space, const std::string& path) {
  LineSink sink(path);
  char buf[64];
  std::string line;
  std::snprintf(buf, sizeof buf, "%zu %u", space.tokens.size(), space.dim);
  sink.write(buf);
  for (std::size_t i = 0; i < space.tokens.size(); ++i) {
    line = space.tokens[i];
    const double* row = space.vectors.data() + i * space.dim;
    for (std::uint32_t d = 0; d < space.dim; ++d) {
      std::snprintf(buf, sizeof buf, " %.9g", row[d]);
      line += buf;
    }
    sink.write(line);
  }
  sink.close();
}

EmbeddingSpace read_embeddings(const std::string& path) {
  LineSource src(path);
  std::string line;
  if (!src.next(line)) throw ParseError(path + ": empty embedding file", 0);
  std::size_t count = 0;
  unsigned dim = 0;
  if (std::sscanf(line.c_str(), "%zu %u", &count, &dim) != 2 || dim == 0)
    throw ParseError(path + ":1: bad header (expected '<count> <dim>')", 1);

  EmbeddingSpace space;
  space.dim = dim;
  space.tokens.reserve(count);
  space.vectors.reserve(count * dim);
  while (src.next(line)) {
    if (line.empty()) continue;
    std::size_t ln = src.line_number();
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos)
      throw ParseError(path + ":" + std::to_string(ln) + ": missing vector", ln);
    space.tokens.push_back(line.substr(0, sp));
    const char* p = line.c_str() + sp;
    for (unsigned d = 0; d < dim; ++d) {
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p)
        throw ParseError(path + ":" + std::to_string(ln) + ": bad component",
                         ln);
      space.vectors.push_back(v);
      p = end;
    }
    while (*p == ' ') ++p;
    if (*p != '\0')
      throw ParseError(path + ":" + std::to_string(ln) + ": extra components",
                       ln);
  }
  if (space.tokens.size() != count)
    throw ParseError(path + ": header claims " + std::to_string(count) +
                         " tokens, found " + std::to_string(space.tokens.size()),
                     0);
  space.rebuild_index();
  return space;
}

}  // namespace kgrec
