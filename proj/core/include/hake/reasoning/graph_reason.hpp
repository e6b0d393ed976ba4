#pragma once

#include <vector>

#include "hake/graph.hpp"
#include "hake/part_state_probs.hpp"

namespace hake::reasoning {

/// One score per activity in the graph's (sorted) activity node order.
using ActivityScores = std::vector<double>;

/// One-step belief propagation across cross-level edges:
/// score(a) = sum_s weight(a, s) * p(s). Every state in the evidence must be
/// a node of the graph.
ActivityScores graph_reason(const PartStateProbs& probs, const KnowledgeGraph& graph);

/// Convex combination w * instance + (1 - w) * part, elementwise. Inputs are
/// expected in [0,1] (apply sigmoid() to raw logits beforehand).
ActivityScores late_fuse(const ActivityScores& instance_scores, const ActivityScores& part_scores,
                         double w = 0.5);

/// Elementwise logistic map onto (0,1).
ActivityScores sigmoid(const ActivityScores& scores);

}  // namespace hake::reasoning
