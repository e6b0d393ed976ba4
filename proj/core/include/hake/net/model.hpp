#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hake/net/gemm.hpp"
#include "hake/net/layers.hpp"
#include "hake/net/tensor.hpp"
#include "hake/rng.hpp"

namespace hake::net {

template <class T>
struct ForwardTrace;

/// Sequential feed-forward network over the five LayerSpec kinds.
///
/// Parameters are fixed after construction unless updated by an optimizer
/// step; `forward` is const and safe to call from many threads. Training
/// uses `forward_traced` + `backward`, which communicate through an explicit
/// ForwardTrace so the model itself stays immutable during inference.
template <class T>
class Model {
 public:
  Model() = default;

  Model(std::vector<int> input_shape, std::vector<LayerSpec> layers, std::uint64_t seed)
      : input_shape_(std::move(input_shape)), layers_(std::move(layers)) {
    infer_shapes();
    init_parameters(seed);
  }

  const std::vector<int>& input_shape() const { return input_shape_; }
  const std::vector<int>& output_shape() const { return shapes_.back(); }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  std::vector<Tensor<T>>& parameters() { return params_; }
  const std::vector<Tensor<T>>& parameters() const { return params_; }

  std::int64_t parameter_count() const {
    std::int64_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
  }

  /// Pure inference on a batch shaped [N, input_shape...].
  Tensor<T> forward(const Tensor<T>& batch) const {
    ForwardTrace<T> trace;
    run_forward(batch, trace, /*keep_trace=*/false);
    return std::move(trace.output);
  }

  /// Forward pass that records what backward needs.
  ForwardTrace<T> forward_traced(const Tensor<T>& batch) const {
    ForwardTrace<T> trace;
    run_forward(batch, trace, /*keep_trace=*/true);
    return trace;
  }

  /// Gradients of a scalar loss w.r.t. every parameter, given dLoss/dOutput.
  /// Requires a trace from forward_traced on the same input.
  std::vector<Tensor<T>> backward(const ForwardTrace<T>& trace, const Tensor<T>& grad_out) const {
    if (!trace.valid) throw Error("backward called before forward");
    if (grad_out.shape != trace.output.shape)
      throw Error("backward: grad_out shape " + Tensor<T>::shape_string(grad_out.shape) +
                  " does not match forward output " + Tensor<T>::shape_string(trace.output.shape));

    std::vector<Tensor<T>> grads;
    grads.reserve(params_.size());
    for (const auto& p : params_) grads.push_back(Tensor<T>::zeros(p.shape));

    Tensor<T> delta = grad_out;
    for (int li = static_cast<int>(layers_.size()) - 1; li >= 0; --li)
      delta = backward_layer(li, trace, delta, grads);
    return grads;
  }

  /// Row-wise softmax of forward logits; rows sum to 1.
  Tensor<T> predict_proba(const Tensor<T>& batch) const {
    Tensor<T> logits = forward(batch);
    softmax_rows_inplace(logits);
    return logits;
  }

  template <class U>
  Model<U> cast() const {
    Model<U> out;
    out.input_shape_ = input_shape_;
    out.layers_ = layers_;
    out.shapes_ = shapes_;
    out.param_index_ = param_index_;
    out.pool_slot_ = pool_slot_;
    out.n_pool_layers_ = n_pool_layers_;
    out.params_.reserve(params_.size());
    for (const auto& p : params_) out.params_.push_back(p.template cast<U>());
    return out;
  }

  static void softmax_rows_inplace(Tensor<T>& logits) {
    if (logits.shape.size() != 2) throw Error("softmax: expected a [N,C] tensor");
    const int n = logits.shape[0], c = logits.shape[1];
    for (int i = 0; i < n; ++i) {
      T* row = logits.ptr() + static_cast<std::size_t>(i) * c;
      T mx = row[0];
      for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
      T sum = T(0);
      for (int j = 0; j < c; ++j) {
        row[j] = std::exp(row[j] - mx);
        sum += row[j];
      }
      for (int j = 0; j < c; ++j) row[j] /= sum;
    }
  }

 private:
  template <class U>
  friend class Model;

  std::string where(int li) const {
    return "layer " + std::to_string(li) + " (" + layer_kind_name(layers_[li].kind) + "): ";
  }

  void infer_shapes() {
    if (input_shape_.empty()) throw Error("model: empty input shape");
    Tensor<T>::element_count(input_shape_);  // validates positivity
    shapes_.clear();
    shapes_.push_back(input_shape_);
    param_index_.assign(layers_.size(), -1);
    pool_slot_.assign(layers_.size(), -1);
    n_pool_layers_ = 0;
    int next_param = 0;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const LayerSpec& spec = layers_[li];
      spec.validate(static_cast<int>(li));
      const std::vector<int>& in = shapes_.back();
      std::vector<int> out;
      switch (spec.kind) {
        case LayerKind::dense: {
          if (in.size() != 1)
            throw Error(where(li) + "input must be rank-1, got " + Tensor<T>::shape_string(in) +
                        " (insert flatten)");
          out = {spec.units};
          param_index_[li] = next_param;
          next_param += 2;
          break;
        }
        case LayerKind::conv2d: {
          if (in.size() != 3)
            throw Error(where(li) + "input must be rank-3 (C,H,W), got " + Tensor<T>::shape_string(in));
          const int oh = (in[1] - spec.kernel_h) / spec.stride + 1;
          const int ow = (in[2] - spec.kernel_w) / spec.stride + 1;
          if (in[1] < spec.kernel_h || in[2] < spec.kernel_w)
            throw Error(where(li) + "kernel larger than input " + Tensor<T>::shape_string(in));
          out = {spec.out_channels, oh, ow};
          param_index_[li] = next_param;
          next_param += 2;
          break;
        }
        case LayerKind::relu:
          out = in;
          break;
        case LayerKind::maxpool2d: {
          if (in.size() != 3)
            throw Error(where(li) + "input must be rank-3 (C,H,W), got " + Tensor<T>::shape_string(in));
          if (in[1] < spec.pool_h || in[2] < spec.pool_w)
            throw Error(where(li) + "pool window larger than input " + Tensor<T>::shape_string(in));
          const int oh = (in[1] - spec.pool_h) / spec.pool_stride + 1;
          const int ow = (in[2] - spec.pool_w) / spec.pool_stride + 1;
          out = {in[0], oh, ow};
          pool_slot_[li] = n_pool_layers_++;
          break;
        }
        case LayerKind::flatten: {
          out = {static_cast<int>(Tensor<T>::element_count(in))};
          break;
        }
      }
      shapes_.push_back(std::move(out));
    }
  }

  void init_parameters(std::uint64_t seed) {
    Rng rng(seed);
    params_.clear();
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const LayerSpec& spec = layers_[li];
      const std::vector<int>& in = shapes_[li];
      if (spec.kind == LayerKind::dense) {
        const int fan_in = in[0], fan_out = spec.units;
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        Tensor<T> w = Tensor<T>::zeros({fan_in, fan_out});
        for (auto& v : w.data) v = static_cast<T>(rng.uniform(-a, a));
        params_.push_back(std::move(w));
        params_.push_back(Tensor<T>::zeros({fan_out}));
      } else if (spec.kind == LayerKind::conv2d) {
        const int k = in[0] * spec.kernel_h * spec.kernel_w;
        const int fan_in = k;
        const int fan_out = spec.out_channels * spec.kernel_h * spec.kernel_w;
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        Tensor<T> w = Tensor<T>::zeros({spec.out_channels, k});
        for (auto& v : w.data) v = static_cast<T>(rng.uniform(-a, a));
        params_.push_back(std::move(w));
        params_.push_back(Tensor<T>::zeros({spec.out_channels}));
      }
    }
  }

  static std::vector<int> batched(int n, const std::vector<int>& s) {
    std::vector<int> out;
    out.reserve(s.size() + 1);
    out.push_back(n);
    out.insert(out.end(), s.begin(), s.end());
    return out;
  }

  void run_forward(const Tensor<T>& batch, ForwardTrace<T>& trace, bool keep_trace) const {
    if (batch.shape.size() != input_shape_.size() + 1 ||
        !std::equal(input_shape_.begin(), input_shape_.end(), batch.shape.begin() + 1))
      throw Error("forward: input batch shape " + Tensor<T>::shape_string(batch.shape) +
                  " does not match model input " + Tensor<T>::shape_string(input_shape_));
    const int n = batch.shape[0];

    trace.acts.clear();
    trace.pool_argmax.assign(n_pool_layers_, {});
    if (keep_trace) {
      // Boundaries are moved into the trace; the next layer reads acts.back().
      trace.acts.push_back(batch);
      for (std::size_t li = 0; li < layers_.size(); ++li)
        trace.acts.push_back(apply_layer(static_cast<int>(li), n, trace.acts.back(), &trace));
      trace.output = trace.acts.back();
      trace.valid = true;
    } else {
      Tensor<T> cur = batch;
      for (std::size_t li = 0; li < layers_.size(); ++li)
        cur = apply_layer(static_cast<int>(li), n, cur, nullptr);
      trace.output = std::move(cur);
      trace.valid = false;
    }
  }

  Tensor<T> apply_layer(int li, int n, const Tensor<T>& in, ForwardTrace<T>* trace) const {
    const LayerSpec& spec = layers_[li];
    const std::vector<int>& si = shapes_[li];
    const std::vector<int>& so = shapes_[li + 1];
    // Every kind writes every output element, so skip the zero fill.
    Tensor<T> out = Tensor<T>::uninitialized(batched(n, so));
    switch (spec.kind) {
      case LayerKind::dense: {
        const Tensor<T>& w = params_[param_index_[li]];
        const Tensor<T>& b = params_[param_index_[li] + 1];
        gemm_nn(in.ptr(), w.ptr(), out.ptr(), n, si[0], so[0], false);
        for (int i = 0; i < n; ++i) {
          T* row = out.ptr() + static_cast<std::size_t>(i) * so[0];
          for (int j = 0; j < so[0]; ++j) row[j] += b[j];
        }
        break;
      }
      case LayerKind::conv2d: {
        const Tensor<T>& w = params_[param_index_[li]];
        const Tensor<T>& b = params_[param_index_[li] + 1];
        const int k = si[0] * spec.kernel_h * spec.kernel_w;
        const int patches = so[1] * so[2];
        std::vector<T> col(static_cast<std::size_t>(k) * patches);
        const std::int64_t in_stride = Tensor<T>::element_count(si);
        const std::int64_t out_stride = Tensor<T>::element_count(so);
        for (int i = 0; i < n; ++i) {
          im2col(in.ptr() + i * in_stride, si[0], si[1], si[2], spec.kernel_h, spec.kernel_w,
                 spec.stride, so[1], so[2], col.data());
          T* y = out.ptr() + i * out_stride;
          gemm_nn(w.ptr(), col.data(), y, spec.out_channels, k, patches, false);
          for (int oc = 0; oc < spec.out_channels; ++oc) {
            T* row = y + static_cast<std::size_t>(oc) * patches;
            for (int p = 0; p < patches; ++p) row[p] += b[oc];
          }
        }
        break;
      }
      case LayerKind::relu: {
        for (std::int64_t i = 0; i < in.size(); ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
        break;
      }
      case LayerKind::maxpool2d: {
        const int c = si[0], ih = si[1], iw = si[2];
        const int oh = so[1], ow = so[2];
        const std::int64_t in_stride = Tensor<T>::element_count(si);
        const std::int64_t out_stride = Tensor<T>::element_count(so);
        std::vector<std::int32_t>* argmax = nullptr;
        if (trace) {
          argmax = &trace->pool_argmax[pool_slot_[li]];
          argmax->resize(static_cast<std::size_t>(n) * out_stride);
        }
        for (int i = 0; i < n; ++i) {
          const T* x = in.ptr() + i * in_stride;
          T* y = out.ptr() + i * out_stride;
          for (int ch = 0; ch < c; ++ch) {
            for (int oy = 0; oy < oh; ++oy) {
              for (int ox = 0; ox < ow; ++ox) {
                const int y0 = oy * spec.pool_stride, x0 = ox * spec.pool_stride;
                std::int32_t best = static_cast<std::int32_t>((ch * ih + y0) * iw + x0);
                T bv = x[best];
                for (int u = 0; u < spec.pool_h; ++u) {
                  for (int v = 0; v < spec.pool_w; ++v) {
                    const std::int32_t idx =
                        static_cast<std::int32_t>((ch * ih + y0 + u) * iw + x0 + v);
                    if (x[idx] > bv) {
                      bv = x[idx];
                      best = idx;
                    }
                  }
                }
                const std::size_t o = static_cast<std::size_t>((ch * oh + oy) * ow + ox);
                y[o] = bv;
                if (argmax) (*argmax)[static_cast<std::size_t>(i) * out_stride + o] = best;
              }
            }
          }
        }
        break;
      }
      case LayerKind::flatten: {
        out.data = in.data;  // same elements, new shape
        break;
      }
    }
    return out;
  }

  /// Backward through layer li; returns dLoss/dInput of that layer.
  Tensor<T> backward_layer(int li, const ForwardTrace<T>& trace, const Tensor<T>& dout,
                           std::vector<Tensor<T>>& grads) const {
    const LayerSpec& spec = layers_[li];
    const std::vector<int>& si = shapes_[li];
    const std::vector<int>& so = shapes_[li + 1];
    const Tensor<T>& in = trace.acts[li];
    const int n = in.shape[0];
    // conv2d and maxpool2d scatter-accumulate into din; the rest overwrite.
    const bool scatter =
        spec.kind == LayerKind::conv2d || spec.kind == LayerKind::maxpool2d;
    Tensor<T> din = scatter ? Tensor<T>::zeros(batched(n, si))
                            : Tensor<T>::uninitialized(batched(n, si));
    switch (spec.kind) {
      case LayerKind::dense: {
        const Tensor<T>& w = params_[param_index_[li]];
        Tensor<T>& gw = grads[param_index_[li]];
        Tensor<T>& gb = grads[param_index_[li] + 1];
        // dW = X^T dY, db = colsum dY, dX = dY W^T
        gemm_tn(in.ptr(), dout.ptr(), gw.ptr(), si[0], n, so[0], true);
        for (int i = 0; i < n; ++i) {
          const T* row = dout.ptr() + static_cast<std::size_t>(i) * so[0];
          for (int j = 0; j < so[0]; ++j) gb[j] += row[j];
        }
        gemm_nt(dout.ptr(), w.ptr(), din.ptr(), n, so[0], si[0], false);
        break;
      }
      case LayerKind::conv2d: {
        const Tensor<T>& w = params_[param_index_[li]];
        Tensor<T>& gw = grads[param_index_[li]];
        Tensor<T>& gb = grads[param_index_[li] + 1];
        const int k = si[0] * spec.kernel_h * spec.kernel_w;
        const int patches = so[1] * so[2];
        std::vector<T> col(static_cast<std::size_t>(k) * patches);
        std::vector<T> dcol(static_cast<std::size_t>(k) * patches);
        const std::int64_t in_stride = Tensor<T>::element_count(si);
        const std::int64_t out_stride = Tensor<T>::element_count(so);
        for (int i = 0; i < n; ++i) {
          const T* dy = dout.ptr() + i * out_stride;
          im2col(in.ptr() + i * in_stride, si[0], si[1], si[2], spec.kernel_h, spec.kernel_w,
                 spec.stride, so[1], so[2], col.data());
          gemm_nt(dy, col.data(), gw.ptr(), spec.out_channels, patches, k, true);
          for (int oc = 0; oc < spec.out_channels; ++oc) {
            const T* row = dy + static_cast<std::size_t>(oc) * patches;
            T acc = T(0);
            for (int p = 0; p < patches; ++p) acc += row[p];
            gb[oc] += acc;
          }
          gemm_tn(w.ptr(), dy, dcol.data(), k, spec.out_channels, patches, false);
          col2im(dcol.data(), si[0], si[1], si[2], spec.kernel_h, spec.kernel_w, spec.stride,
                 so[1], so[2], din.ptr() + i * in_stride);
        }
        break;
      }
      case LayerKind::relu: {
        const Tensor<T>& y = trace.acts[li + 1];
        for (std::int64_t i = 0; i < dout.size(); ++i) din[i] = y[i] > T(0) ? dout[i] : T(0);
        break;
      }
      case LayerKind::maxpool2d: {
        const std::vector<std::int32_t>& argmax = trace.pool_argmax[pool_slot_[li]];
        const std::int64_t in_stride = Tensor<T>::element_count(si);
        const std::int64_t out_stride = Tensor<T>::element_count(so);
        for (int i = 0; i < n; ++i) {
          const T* dy = dout.ptr() + i * out_stride;
          T* dx = din.ptr() + i * in_stride;
          const std::int32_t* am = argmax.data() + static_cast<std::size_t>(i) * out_stride;
          for (std::int64_t o = 0; o < out_stride; ++o) dx[am[o]] += dy[o];
        }
        break;
      }
      case LayerKind::flatten: {
        din.data = dout.data;
        break;
      }
    }
    return din;
  }

  static void im2col(const T* x, int c, int h, int w, int kh, int kw, int stride, int oh, int ow,
                     T* col) {
    // col[(ch*kh+u)*kw+v][oy*ow+ox] = x[ch][oy*stride+u][ox*stride+v]
    const int patches = oh * ow;
    for (int ch = 0; ch < c; ++ch) {
      for (int u = 0; u < kh; ++u) {
        for (int v = 0; v < kw; ++v) {
          T* dst = col + (static_cast<std::size_t>(ch) * kh * kw + u * kw + v) * patches;
          for (int oy = 0; oy < oh; ++oy) {
            const T* src = x + (static_cast<std::size_t>(ch) * h + oy * stride + u) * w + v;
            if (stride == 1) {
              for (int ox = 0; ox < ow; ++ox) dst[oy * ow + ox] = src[ox];
            } else {
              for (int ox = 0; ox < ow; ++ox) dst[oy * ow + ox] = src[ox * stride];
            }
          }
        }
      }
    }
  }

  static void col2im(const T* col, int c, int h, int w, int kh, int kw, int stride, int oh, int ow,
                     T* x) {
    const int patches = oh * ow;
    for (int ch = 0; ch < c; ++ch) {
      for (int u = 0; u < kh; ++u) {
        for (int v = 0; v < kw; ++v) {
          const T* src = col + (static_cast<std::size_t>(ch) * kh * kw + u * kw + v) * patches;
          for (int oy = 0; oy < oh; ++oy) {
            T* dst = x + (static_cast<std::size_t>(ch) * h + oy * stride + u) * w + v;
            for (int ox = 0; ox < ow; ++ox) dst[ox * stride] += src[oy * ow + ox];
          }
        }
      }
    }
  }

  std::vector<int> input_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<std::vector<int>> shapes_;  // shapes_[0] = input, shapes_[i+1] = out of layer i
  std::vector<Tensor<T>> params_;
  std::vector<int> param_index_;  // per layer: index of weight tensor, -1 if none
  std::vector<int> pool_slot_;
  int n_pool_layers_ = 0;
};

/// What backward needs from a forward pass: per-boundary activations and
/// pooling argmax routes. Produced by Model::forward_traced.
template <class T>
struct ForwardTrace {
  bool valid = false;
  Tensor<T> output;
  std::vector<Tensor<T>> acts;
  std::vector<std::vector<std::int32_t>> pool_argmax;
};

}  // namespace hake::net
