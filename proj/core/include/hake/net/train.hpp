#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "hake/net/loss.hpp"
#include "hake/net/model.hpp"
#include "hake/rng.hpp"

namespace hake::net {

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 1;
  int batch_size = 64;
  std::uint64_t seed = 1;
  LossKind loss = LossKind::softmax_ce;

  void validate() const {
    if (learning_rate <= 0) throw Error("train config: learning_rate must be > 0");
    if (epochs <= 0) throw Error("train config: epochs must be positive");
    if (batch_size <= 0) throw Error("train config: batch_size must be positive");
  }
};

/// Plain SGD: p <- p - lr * g, elementwise.
template <class T>
void sgd_step(std::vector<Tensor<T>>& params, const std::vector<Tensor<T>>& grads,
              double learning_rate) {
  if (params.size() != grads.size()) throw Error("sgd_step: parameter/gradient count mismatch");
  const T lr = static_cast<T>(learning_rate);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape != grads[i].shape)
      throw Error("sgd_step: shape mismatch at parameter " + std::to_string(i));
    T* p = params[i].ptr();
    const T* g = grads[i].ptr();
    const std::int64_t n = params[i].size();
    for (std::int64_t j = 0; j < n; ++j) p[j] -= lr * g[j];
  }
}

struct CurvePoint {
  std::int64_t samples_seen = 0;
  double loss = 0;
};

/// Keeps large activation buffers inside the heap instead of bouncing them
/// through mmap/munmap every batch (glibc only; no-op elsewhere). Idempotent;
/// fit() calls it automatically.
void tune_allocator_for_training();

/// Deterministic single-threaded minibatch SGD loop. `make_batch` maps a
/// slice of example indices to (input tensor, loss functor); the functor
/// carries that batch's targets.
template <class T, class MakeBatch>
std::vector<CurvePoint> fit(Model<T>& model, std::int64_t n_examples, const TrainConfig& cfg,
                            MakeBatch&& make_batch, int log_every_batches = 50) {
  cfg.validate();
  if (n_examples <= 0) throw Error("fit: no training examples");
  tune_allocator_for_training();

  std::vector<std::int64_t> order(static_cast<std::size_t>(n_examples));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed ^ 0xD1B54A32D192ED03ULL);

  std::vector<CurvePoint> curve;
  std::int64_t samples_seen = 0;
  double window_loss = 0;
  int window_batches = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.data(), order.size());
    for (std::int64_t start = 0; start < n_examples; start += cfg.batch_size) {
      const std::int64_t end = std::min<std::int64_t>(start + cfg.batch_size, n_examples);
      std::vector<std::int64_t> idx(order.begin() + start, order.begin() + end);
      auto [x, loss] = make_batch(idx);
      ForwardTrace<T> trace = model.forward_traced(x);
      window_loss += loss.value(trace.output);
      ++window_batches;
      Tensor<T> gout = loss.grad(trace.output);
      std::vector<Tensor<T>> grads = model.backward(trace, gout);
      sgd_step(model.parameters(), grads, cfg.learning_rate);
      samples_seen += end - start;
      if (window_batches == log_every_batches || end == n_examples) {
        curve.push_back({samples_seen, window_loss / window_batches});
        window_loss = 0;
        window_batches = 0;
      }
    }
  }
  return curve;
}

}  // namespace hake::net
