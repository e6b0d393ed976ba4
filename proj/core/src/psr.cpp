#include "hake/reasoning/psr.hpp"

namespace hake::reasoning {

net::Model<float> make_psr(int input_dim, int n_activities, const std::vector<int>& hidden) {
  if (input_dim <= 0 || n_activities <= 0)
    throw Error("make_psr: dimensions must be positive");
  std::vector<net::LayerSpec> layers;
  for (int width : hidden) {
    layers.push_back(net::LayerSpec::dense(width));
    layers.push_back(net::LayerSpec::relu());
  }
  layers.push_back(net::LayerSpec::dense(n_activities));
  return net::Model<float>({input_dim}, layers, /*seed=*/0x505352ULL);
}

ActivityScores psr_forward(const a2v::ActivityEmbedding& embedding,
                           const net::Model<float>& reasoner) {
  if (reasoner.input_shape().size() != 1 || reasoner.input_shape()[0] != embedding.dim())
    throw Error("psr_forward: embedding dimension " + std::to_string(embedding.dim()) +
                " does not match reasoner input " +
                net::Tensor<float>::shape_string(reasoner.input_shape()));
  net::Tensor<float> x = net::Tensor<float>::zeros({1, embedding.dim()});
  for (int i = 0; i < embedding.dim(); ++i)
    x[static_cast<std::size_t>(i)] = static_cast<float>(embedding.values[static_cast<std::size_t>(i)]);
  const net::Tensor<float> logits = reasoner.forward(x);
  ActivityScores scores(static_cast<std::size_t>(logits.shape[1]));
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = logits[i];
  return scores;
}

}  // namespace hake::reasoning
