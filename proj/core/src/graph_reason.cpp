#include "hake/reasoning/graph_reason.hpp"

#include <cmath>

namespace hake::reasoning {

ActivityScores graph_reason(const PartStateProbs& probs, const KnowledgeGraph& graph) {
  probs.validate();
  // Flatten the evidence and check coverage up front.
  std::vector<double> evidence(graph.states.size(), 0.0);
  for (const auto& [part, entry] : probs.parts) {
    for (std::size_t s = 0; s < entry.states.size(); ++s) {
      const int idx = graph.state_index(entry.states[s]);
      if (idx < 0)
        throw Error("graph_reason: state '" + entry.states[s].token() +
                    "' is not covered by the graph");
      evidence[static_cast<std::size_t>(idx)] += entry.probs[s];
    }
  }
  ActivityScores scores(graph.activities.size(), 0.0);
  for (const auto& edge : graph.cross_edges)
    scores[static_cast<std::size_t>(edge.activity)] +=
        edge.weight * evidence[static_cast<std::size_t>(edge.state)];
  return scores;
}

ActivityScores late_fuse(const ActivityScores& instance_scores, const ActivityScores& part_scores,
                         double w) {
  if (instance_scores.size() != part_scores.size())
    throw Error("late_fuse: score lengths differ (" + std::to_string(instance_scores.size()) +
                " vs " + std::to_string(part_scores.size()) + ")");
  if (w < 0 || w > 1) throw Error("late_fuse: weight must be in [0,1]");
  ActivityScores out(instance_scores.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = w * instance_scores[i] + (1 - w) * part_scores[i];
  return out;
}

ActivityScores sigmoid(const ActivityScores& scores) {
  ActivityScores out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-scores[i]));
  return out;
}

}  // namespace hake::reasoning
