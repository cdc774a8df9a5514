#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgrec {

struct TrainParams {
  std::uint32_t dimension = 200;
  std::uint32_t window = 5;
  std::uint32_t epochs = 5;
  std::uint32_t negative_samples = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;  // linear decay target
  std::uint32_t min_count = 1;
  double subsample = 0.0;  // 0 disables frequent-token subsampling
  std::uint64_t seed = 1;
  bool deterministic = true;  // single stream, fixed order, bit-reproducible
  std::uint32_t threads = 1;  // used only when deterministic is false

  void validate() const;  // throws ValidationError listing all problems
};

struct EmbeddingSpace {
  std::string kg;
  std::uint32_t dim = 0;
  std::vector<std::string> tokens;  // row i holds the vector of tokens[i]
  std::vector<double> vectors;      // row-major, tokens.size() * dim
  TrainParams params;               // snapshot of how it was trained

  std::unordered_map<std::string, std::int32_t> index;

  void rebuild_index();
  std::int32_t find(std::string_view token) const;      // -1 when absent
  std::span<const double> vector_of(std::int32_t row) const;
};

// Cosine similarity. Throws DomainError on size mismatch or a zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

// Text format: header "<token_count> <dimension>", then one row per token:
// the token and its components at 9 significant digits. A file read and
// written again reproduces itself byte for byte.
void write_embeddings(const EmbeddingSpace& space, const std::string& path);
EmbeddingSpace read_embeddings(const std::string& path);

}  // namespace kgrec
