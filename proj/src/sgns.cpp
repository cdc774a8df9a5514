#include "kgrec/sgns.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "kgrec/error.hpp"
#include "kgrec/rng.hpp"

namespace kgrec {

SgnsModel init_model(std::size_t vocab_size, std::uint32_t dim,
                     std::uint64_t seed) {
  SgnsModel m;
  m.dim = dim;
  m.input.resize(vocab_size * dim);
  m.output.assign(vocab_size * dim, 0.0);
  SplitMix64 rng = stream_for(seed, 0xC0FFEE);
  double scale = 1.0 / dim;
  for (auto& v : m.input) v = (rng.unit() - 0.5) * scale;
  return m;
}

double log_sigmoid(double x) {
  // stable in both tails
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double dot(const double* a, const double* b, std::uint32_t dim) {
  double s = 0;
  for (std::uint32_t i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double sgns_step(SgnsModel& m, std::int32_t center, std::int32_t context,
                 std::span<const std::int32_t> negatives, double lr) {
  const std::uint32_t dim = m.dim;
  double* v = m.in_row(center);

  // pass 1: all dot products against the pre-step parameters
  double loss = 0;
  std::vector<double> g(negatives.size() + 1);
  std::vector<double> vgrad(dim, 0.0);
  {
    double* u = m.out_row(context);
    double f = dot(u, v, dim);
    loss -= log_sigmoid(f);
    g[0] = 1.0 - sigmoid(f);
    for (std::uint32_t d = 0; d < dim; ++d) vgrad[d] += g[0] * u[d];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    double* u = m.out_row(negatives[k]);
    double f = dot(u, v, dim);
    loss -= log_sigmoid(-f);
    g[k + 1] = -sigmoid(f);
    for (std::uint32_t d = 0; d < dim; ++d) vgrad[d] += g[k + 1] * u[d];
  }

  // pass 2: apply; repeated rows accumulate, matching the summed gradient
  {
    double* u = m.out_row(context);
    for (std::uint32_t d = 0; d < dim; ++d) u[d] += lr * g[0] * v[d];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    double* u = m.out_row(negatives[k]);
    for (std::uint32_t d = 0; d < dim; ++d) u[d] += lr * g[k + 1] * v[d];
  }
  for (std::uint32_t d = 0; d < dim; ++d) v[d] += lr * vgrad[d];
  return loss;
}

namespace {

struct Progress {
  std::atomic<std::uint64_t> positions{0};
  std::uint64_t total = 1;
  double lr0 = 0.025;
  double lr_min = 1e-4;

  double next_lr() {
    std::uint64_t done = positions.fetch_add(1, std::memory_order_relaxed);
    double t = static_cast<double>(done) / static_cast<double>(total);
    if (t > 1.0) t = 1.0;
    return lr0 + (lr_min - lr0) * t;
  }
};

// Processes one sentence: subsampling, window pairs, negative draws, steps.
// Returns (loss sum, pair count).
std::pair<double, std::uint64_t> train_sentence(
    SgnsModel& m, const Vocabulary& vocab, const TrainParams& p,
    const std::vector<std::int32_t>& sentence, SplitMix64& rng,
    Progress& progress, std::vector<std::int32_t>& kept,
    std::vector<std::int32_t>& negs) {
  kept.clear();
  if (p.subsample > 0) {
    for (std::int32_t id : sentence) {
      double f = static_cast<double>(vocab.counts[id]) /
                 static_cast<double>(vocab.total_count);
      double keep = (std::sqrt(f / p.subsample) + 1.0) * (p.subsample / f);
      if (keep >= 1.0 || rng.unit() < keep) kept.push_back(id);
    }
  } else {
    kept = sentence;
  }

  double loss_sum = 0;
  std::uint64_t pairs = 0;
  const std::int64_t n = static_cast<std::int64_t>(kept.size());
  for (std::int64_t i = 0; i < n; ++i) {
    double lr = progress.next_lr();
    std::int32_t center = kept[i];
    std::int64_t w = static_cast<std::int64_t>(p.window);
    for (std::int64_t off = -w; off <= w; ++off) {
      if (off == 0) continue;
      std::int64_t j = i + off;
      if (j < 0 || j >= n) continue;
      std::int32_t context = kept[j];
      negs.clear();
      for (std::uint32_t k = 0; k < p.negative_samples; ++k) {
        std::int32_t cand = vocab.sample_noise(rng);
        if (cand == context) continue;  // never use the positive as a negative
        negs.push_back(cand);
      }
      loss_sum += sgns_step(m, center, context, negs, lr);
      ++pairs;
    }
  }
  return {loss_sum, pairs};
}

}  // namespace

TrainResult train(const Sentences& corpus, const TrainParams& p,
                  const std::string& kg_label) {
  p.validate();
  Vocabulary vocab = build_vocab(corpus, p.min_count);
  auto encoded = encode(corpus, vocab);

  std::uint64_t positions_per_epoch = 0;
  for (const auto& s : encoded) positions_per_epoch += s.size();

  SgnsModel model = init_model(vocab.size(), p.dimension, p.seed);
  Progress progress;
  progress.total = positions_per_epoch * p.epochs;
  if (progress.total == 0) progress.total = 1;
  progress.lr0 = p.learning_rate;
  progress.lr_min = p.min_learning_rate;

  TrainResult result;
  result.epoch_mean_loss.reserve(p.epochs);

  unsigned threads = p.deterministic ? 1 : std::max<std::uint32_t>(1, p.threads);
  for (std::uint32_t epoch = 0; epoch < p.epochs; ++epoch) {
    double loss_sum = 0;
    std::uint64_t pair_count = 0;
    if (threads == 1) {
      SplitMix64 rng = stream_for(p.seed, 0x5EED0000ULL + epoch);
      std::vector<std::int32_t> kept, negs;
      for (const auto& sentence : encoded) {
        auto [l, c] = train_sentence(model, vocab, p, sentence, rng, progress,
                                     kept, negs);
        loss_sum += l;
        pair_count += c;
      }
    } else {
      // hogwild: workers update the shared matrices without locks; results
      // are statistically equivalent but not bit-reproducible
      std::vector<std::thread> pool;
      std::vector<double> losses(threads, 0.0);
      std::vector<std::uint64_t> counts(threads, 0);
      for (unsigned tid = 0; tid < threads; ++tid) {
        pool.emplace_back([&, tid] {
          SplitMix64 rng =
              stream_for(p.seed, 0x7770000ULL + epoch * 4096ULL + tid);
          std::vector<std::int32_t> kept, negs;
          for (std::size_t i = tid; i < encoded.size(); i += threads) {
            auto [l, c] = train_sentence(model, vocab, p, encoded[i], rng,
                                         progress, kept, negs);
            losses[tid] += l;
            counts[tid] += c;
          }
        });
      }
      for (auto& th : pool) th.join();
      for (unsigned tid = 0; tid < threads; ++tid) {
        loss_sum += losses[tid];
        pair_count += counts[tid];
      }
    }
    result.epoch_mean_loss.push_back(
        pair_count ? loss_sum / static_cast<double>(pair_count) : 0.0);
  }

  result.space.kg = kg_label;
  result.space.dim = p.dimension;
  result.space.tokens = vocab.tokens;
  result.space.vectors = std::move(model.input);
  result.space.params = p;
  result.space.rebuild_index();
  return result;
}

}  // namespace kgrec
