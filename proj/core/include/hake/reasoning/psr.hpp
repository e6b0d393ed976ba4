#pragma once

#include <vector>

#include "hake/a2v/activity2vec.hpp"
#include "hake/net/model.hpp"
#include "hake/reasoning/graph_reason.hpp"

namespace hake::reasoning {

/// Fully-connected reasoner from activity embeddings to per-activity logits.
/// Trained with the multi-label sigmoid loss; this builds the default
/// two-hidden-layer stack.
net::Model<float> make_psr(int input_dim, int n_activities,
                           const std::vector<int>& hidden = {512, 512});

/// Pre-sigmoid logits, one per activity. The embedding dimension must match
/// the reasoner input.
ActivityScores psr_forward(const a2v::ActivityEmbedding& embedding,
                           const net::Model<float>& reasoner);

}  // namespace hake::reasoning
