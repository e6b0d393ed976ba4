#pragma once

#include <cmath>

#include "hake/net/model.hpp"
#include "hake/net/tensor.hpp"

namespace hake::net {

/// Verifies analytic gradients against central finite differences.
///
/// The numeric side always runs on a double-precision copy of the model, so
/// the reported error measures the quality of the mode-under-test's own
/// backward pass rather than finite-difference noise. Returns
/// max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
template <class T, class Loss>
double grad_check(const Model<T>& model, const Loss& loss, const Tensor<T>& input,
                  double epsilon) {
  if (!(epsilon > 0)) throw Error("grad_check: epsilon must be positive");

  ForwardTrace<T> trace = model.forward_traced(input);
  const double loss_value = loss.value(trace.output);
  if (!std::isfinite(loss_value)) throw Error("grad_check: non-finite loss");
  const std::vector<Tensor<T>> analytic = model.backward(trace, loss.grad(trace.output));

  Model<double> probe = model.template cast<double>();
  const auto dloss = loss.template cast<double>();
  const Tensor<double> dinput = input.template cast<double>();

  double max_rel = 0.0;
  auto& params = probe.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::int64_t e = 0; e < params[t].size(); ++e) {
      const double p0 = params[t][e];
      params[t][e] = p0 + epsilon;
      const double lp = dloss.value(probe.forward(dinput));
      params[t][e] = p0 - epsilon;
      const double lm = dloss.value(probe.forward(dinput));
      params[t][e] = p0;
      const double numeric = (lp - lm) / (2 * epsilon);
      const double a = static_cast<double>(analytic[t][e]);
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace hake::net
