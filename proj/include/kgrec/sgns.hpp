#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgrec/embedding.hpp"
#include "kgrec/vocab.hpp"

namespace kgrec {

// Two-matrix skip-gram state: `input` rows are the center-token vectors that
// become the published embedding, `output` rows are context vectors.
struct SgnsModel {
  std::uint32_t dim = 0;
  std::vector<double> input;
  std::vector<double> output;

  double* in_row(std::int32_t i) { return input.data() + std::size_t(i) * dim; }
  double* out_row(std::int32_t i) { return output.data() + std::size_t(i) * dim; }
  const double* in_row(std::int32_t i) const {
    return input.data() + std::size_t(i) * dim;
  }
  const double* out_row(std::int32_t i) const {
    return output.data() + std::size_t(i) * dim;
  }
};

// Input rows uniform in [-0.5/dim, 0.5/dim], output rows zero.
SgnsModel init_model(std::size_t vocab_size, std::uint32_t dim,
                     std::uint64_t seed);

// Numerically exact log sigmoid (no lookup-table quantization); the gradient
// check depends on this being smooth.
double log_sigmoid(double x);

// One SGD step for (center, context) against the given negative tokens.
// All gradients are evaluated at the pre-step parameters, so the applied
// update is one plain gradient step of
//   L = -log s(out_ctx . in_c) - sum_k log s(-out_k . in_c).
// Returns L at the pre-step parameters.
double sgns_step(SgnsModel& m, std::int32_t center, std::int32_t context,
                 std::span<const std::int32_t> negatives, double lr);

struct TrainResult {
  EmbeddingSpace space;
  std::vector<double> epoch_mean_loss;  // mean per-pair loss, one per epoch
};

// Skip-gram with negative sampling over the corpus. Deterministic mode uses
// one RNG stream and a fixed pair order, making the result bit-reproducible;
// otherwise sentences are sharded across p.threads lock-free workers.
TrainResult train(const Sentences& corpus, const TrainParams& p,
                  const std::string& kg_label);

}  // namespace kgrec
