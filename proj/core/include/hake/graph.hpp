#pragma once

#include <string>
#include <vector>

#include "hake/knowledge.hpp"

namespace hake {

enum class GraphWeighting { frequency, npmi };

/// Bipartite activity/part-state graph with within-level co-occurrence
/// edges. Node order is the sorted label order, so the graph built from a
/// given instance multiset is unique regardless of input order.
struct KnowledgeGraph {
  struct CrossEdge {
    int activity = 0, state = 0;
    double weight = 0;
    bool operator==(const CrossEdge&) const = default;
  };
  struct WithinEdge {
    int u = 0, v = 0;  // u < v, indices within the level's node list
    double weight = 0;
    bool operator==(const WithinEdge&) const = default;
  };

  GraphWeighting weighting = GraphWeighting::frequency;
  std::vector<ActivityLabel> activities;
  std::vector<PartStateTriple> states;
  std::vector<CrossEdge> cross_edges;
  std::vector<WithinEdge> state_edges;     // within part-state level
  std::vector<WithinEdge> activity_edges;  // within activity level

  bool operator==(const KnowledgeGraph&) const = default;

  int activity_index(const ActivityLabel& a) const;    // -1 if absent
  int state_index(const PartStateTriple& s) const;     // -1 if absent

  /// Connected components over all nodes and edge kinds; returns the
  /// component id per node (activities first, then states).
  std::vector<int> components() const;
};

/// Counts co-occurrence over instances and builds the graph.
///
/// A cross edge (a, s) exists iff some instance carries activity a with
/// state s annotated under a. Within-level edges link labels that co-occur
/// in an instance (states compared on the instance's merged state set).
/// frequency weights are raw instance counts; npmi weights are in [-1, 1].
KnowledgeGraph build_graph(const std::vector<PersonInstance>& instances,
                           GraphWeighting weighting);

}  // namespace hake
