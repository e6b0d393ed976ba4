#pragma once

#include <string>
#include <vector>

#include "hake/error.hpp"

namespace hake::net {

enum class LayerKind { dense, conv2d, relu, maxpool2d, flatten };

inline const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::flatten: return "flatten";
  }
  return "?";
}

/// One layer of a sequential model. Only the fields for `kind` are meaningful.
struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  int units = 0;                                       // dense
  int out_channels = 0, kernel_h = 0, kernel_w = 0;    // conv2d
  int stride = 1;                                      // conv2d
  int pool_h = 0, pool_w = 0, pool_stride = 0;         // maxpool2d; stride 0 = window

  static LayerSpec dense(int units) {
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.units = units;
    return s;
  }
  static LayerSpec conv2d(int out_channels, int kernel_h, int kernel_w, int stride = 1) {
    LayerSpec s;
    s.kind = LayerKind::conv2d;
    s.out_channels = out_channels;
    s.kernel_h = kernel_h;
    s.kernel_w = kernel_w;
    s.stride = stride;
    return s;
  }
  static LayerSpec relu() {
    LayerSpec s;
    s.kind = LayerKind::relu;
    return s;
  }
  static LayerSpec maxpool2d(int window, int stride = 0) {
    LayerSpec s;
    s.kind = LayerKind::maxpool2d;
    s.pool_h = window;
    s.pool_w = window;
    s.pool_stride = stride == 0 ? window : stride;
    return s;
  }
  static LayerSpec flatten() {
    LayerSpec s;
    s.kind = LayerKind::flatten;
    return s;
  }

  void validate(int index) const {
    const std::string where = "layer " + std::to_string(index) + " (" + layer_kind_name(kind) + "): ";
    switch (kind) {
      case LayerKind::dense:
        if (units <= 0) throw Error(where + "units must be positive");
        break;
      case LayerKind::conv2d:
        if (out_channels <= 0 || kernel_h <= 0 || kernel_w <= 0)
          throw Error(where + "channel and kernel sizes must be positive");
        if (stride < 1) throw Error(where + "stride must be >= 1");
        break;
      case LayerKind::maxpool2d:
        if (pool_h <= 0 || pool_w <= 0 || pool_stride < 1)
          throw Error(where + "pool window and stride must be positive");
        break;
      default:
        break;
    }
  }
};

}  // namespace hake::net
