#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hake/net/model.hpp"
#include "hake/net/tensor.hpp"

namespace hake::net {

enum class LossKind { softmax_ce, sigmoid_ce_multilabel, triplet };

inline const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::softmax_ce: return "softmax_ce";
    case LossKind::sigmoid_ce_multilabel: return "sigmoid_ce_multilabel";
    case LossKind::triplet: return "triplet";
  }
  return "?";
}

/// Hinge on squared distances: max(0, |a-p|^2 - |a-n|^2 + margin).
/// Rank-1 tensors are a single triple; rank-2 are batches averaged over rows.
template <class T>
double triplet_loss(const Tensor<T>& anchor, const Tensor<T>& positive, const Tensor<T>& negative,
                    double margin) {
  if (anchor.shape != positive.shape || anchor.shape != negative.shape)
    throw Error("triplet_loss: anchor/positive/negative shapes differ");
  if (margin < 0) throw Error("triplet_loss: margin must be >= 0");
  const std::int64_t rows = anchor.shape.size() >= 2 ? anchor.shape[0] : 1;
  const std::int64_t dim = anchor.size() / rows;
  double total = 0;
  for (std::int64_t r = 0; r < rows; ++r) {
    const T* a = anchor.ptr() + r * dim;
    const T* p = positive.ptr() + r * dim;
    const T* nn = negative.ptr() + r * dim;
    double dp = 0, dn = 0;
    for (std::int64_t i = 0; i < dim; ++i) {
      const double ep = static_cast<double>(a[i]) - static_cast<double>(p[i]);
      const double en = static_cast<double>(a[i]) - static_cast<double>(nn[i]);
      dp += ep * ep;
      dn += en * en;
    }
    total += std::max(0.0, dp - dn + margin);
  }
  return total / static_cast<double>(rows);
}

/// Multi-class cross entropy over logits [N,C] with integer labels.
/// Loss is averaged over the batch.
template <class T>
struct SoftmaxCrossEntropy {
  std::vector<int> labels;

  void check(const Tensor<T>& logits) const {
    if (logits.shape.size() != 2)
      throw Error("softmax_ce: expected [N,C] logits, got " +
                  Tensor<T>::shape_string(logits.shape));
    if (static_cast<int>(labels.size()) != logits.shape[0])
      throw Error("softmax_ce: batch size does not match label count");
    for (int y : labels)
      if (y < 0 || y >= logits.shape[1]) throw Error("softmax_ce: label out of range");
  }

  double value(const Tensor<T>& logits) const {
    check(logits);
    const int n = logits.shape[0], c = logits.shape[1];
    double total = 0;
    for (int i = 0; i < n; ++i) {
      const T* row = logits.ptr() + static_cast<std::size_t>(i) * c;
      double mx = row[0];
      for (int j = 1; j < c; ++j) mx = std::max(mx, static_cast<double>(row[j]));
      double lse = 0;
      for (int j = 0; j < c; ++j) lse += std::exp(static_cast<double>(row[j]) - mx);
      total += mx + std::log(lse) - static_cast<double>(row[labels[i]]);
    }
    return total / n;
  }

  Tensor<T> grad(const Tensor<T>& logits) const {
    check(logits);
    Tensor<T> g = logits;
    Model<T>::softmax_rows_inplace(g);
    const int n = logits.shape[0], c = logits.shape[1];
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i) * c + labels[i]] -= T(1);
    const T inv = T(1) / static_cast<T>(n);
    for (auto& v : g.data) v *= inv;
    return g;
  }

  template <class U>
  SoftmaxCrossEntropy<U> cast() const {
    return SoftmaxCrossEntropy<U>{labels};
  }
};

/// Independent per-class sigmoid cross entropy for multi-label targets in
/// [0,1]; summed over classes, averaged over the batch.
template <class T>
struct SigmoidCrossEntropy {
  Tensor<T> targets;

  void check(const Tensor<T>& logits) const {
    if (logits.shape != targets.shape)
      throw Error("sigmoid_ce: logits shape " + Tensor<T>::shape_string(logits.shape) +
                  " does not match targets " + Tensor<T>::shape_string(targets.shape));
    if (logits.shape.size() != 2) throw Error("sigmoid_ce: expected [N,C] logits");
  }

  double value(const Tensor<T>& logits) const {
    check(logits);
    const int n = logits.shape[0];
    double total = 0;
    for (std::int64_t i = 0; i < logits.size(); ++i) {
      const double y = static_cast<double>(logits[i]);
      const double t = static_cast<double>(targets[i]);
      total += std::max(y, 0.0) - y * t + std::log1p(std::exp(-std::abs(y)));
    }
    return total / n;
  }

  Tensor<T> grad(const Tensor<T>& logits) const {
    check(logits);
    Tensor<T> g = Tensor<T>::zeros(logits.shape);
    const int n = logits.shape[0];
    const double inv = 1.0 / n;
    for (std::int64_t i = 0; i < logits.size(); ++i) {
      const double y = static_cast<double>(logits[i]);
      const double s = 1.0 / (1.0 + std::exp(-y));
      g[i] = static_cast<T>((s - static_cast<double>(targets[i])) * inv);
    }
    return g;
  }

  template <class U>
  SigmoidCrossEntropy<U> cast() const {
    return SigmoidCrossEntropy<U>{targets.template cast<U>()};
  }
};

/// Triplet loss viewed from the anchor: the tensor under differentiation is
/// the anchor batch, positive/negative are fixed.
template <class T>
struct TripletFromAnchor {
  Tensor<T> positive, negative;
  double margin = 0.2;

  double value(const Tensor<T>& anchor) const {
    return triplet_loss(anchor, positive, negative, margin);
  }

  Tensor<T> grad(const Tensor<T>& anchor) const {
    if (anchor.shape != positive.shape || anchor.shape != negative.shape)
      throw Error("triplet_loss: anchor/positive/negative shapes differ");
    Tensor<T> g = Tensor<T>::zeros(anchor.shape);
    const std::int64_t rows = anchor.shape.size() >= 2 ? anchor.shape[0] : 1;
    const std::int64_t dim = anchor.size() / rows;
    for (std::int64_t r = 0; r < rows; ++r) {
      const T* a = anchor.ptr() + r * dim;
      const T* p = positive.ptr() + r * dim;
      const T* nn = negative.ptr() + r * dim;
      double dp = 0, dn = 0;
      for (std::int64_t i = 0; i < dim; ++i) {
        const double ep = static_cast<double>(a[i]) - static_cast<double>(p[i]);
        const double en = static_cast<double>(a[i]) - static_cast<double>(nn[i]);
        dp += ep * ep;
        dn += en * en;
      }
      if (dp - dn + margin > 0) {
        T* gr = g.ptr() + r * dim;
        const double inv = 2.0 / static_cast<double>(rows);
        // d/da (|a-p|^2 - |a-n|^2) = 2(n - p)
        for (std::int64_t i = 0; i < dim; ++i)
          gr[i] = static_cast<T>((static_cast<double>(nn[i]) - static_cast<double>(p[i])) * inv);
      }
    }
    return g;
  }

  template <class U>
  TripletFromAnchor<U> cast() const {
    return TripletFromAnchor<U>{positive.template cast<U>(), negative.template cast<U>(), margin};
  }
};

}  // namespace hake::net
