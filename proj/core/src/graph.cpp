#include "hake/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hake/npmi.hpp"

namespace hake {

int KnowledgeGraph::activity_index(const ActivityLabel& a) const {
  auto it = std::lower_bound(activities.begin(), activities.end(), a);
  if (it == activities.end() || *it != a) return -1;
  return static_cast<int>(it - activities.begin());
}

int KnowledgeGraph::state_index(const PartStateTriple& s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s) return -1;
  return static_cast<int>(it - states.begin());
}

std::vector<int> KnowledgeGraph::components() const {
  const int na = static_cast<int>(activities.size());
  const int n = na + static_cast<int>(states.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  for (const auto& e : cross_edges) unite(e.activity, na + e.state);
  for (const auto& e : state_edges) unite(na + e.u, na + e.v);
  for (const auto& e : activity_edges) unite(e.u, e.v);
  std::vector<int> comp(n);
  std::map<int, int> renumber;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    auto [it, inserted] = renumber.emplace(root, static_cast<int>(renumber.size()));
    comp[i] = it->second;
  }
  return comp;
}

KnowledgeGraph build_graph(const std::vector<PersonInstance>& instances,
                           GraphWeighting weighting) {
  if (instances.empty()) throw Error("build_graph: empty instance list");
  for (const auto& inst : instances) inst.validate();

  KnowledgeGraph graph;
  graph.weighting = weighting;

  // Node lists in sorted order so the result is permutation invariant.
  {
    std::set<ActivityLabel> acts;
    std::set<PartStateTriple> sts;
    for (const auto& inst : instances) {
      acts.insert(inst.activities.begin(), inst.activities.end());
      for (const auto& [a, states] : inst.part_states) sts.insert(states.begin(), states.end());
    }
    graph.activities.assign(acts.begin(), acts.end());
    graph.states.assign(sts.begin(), sts.end());
  }

  const double n_instances = static_cast<double>(instances.size());
  std::map<int, double> activity_count, state_count;
  std::map<std::pair<int, int>, double> cross, state_pair, activity_pair;

  for (const auto& inst : instances) {
    std::vector<int> acts;
    for (const auto& a : inst.activities) {
      const int ai = graph.activity_index(a);
      acts.push_back(ai);
      activity_count[ai] += 1;
    }
    const auto merged = inst.merged_states();
    std::vector<int> sts;
    for (const auto& s : merged) {
      const int si = graph.state_index(s);
      sts.push_back(si);
      state_count[si] += 1;
    }
    // Cross edges use the per-activity attribution, not the merged set.
    for (const auto& [a, states] : inst.part_states) {
      const int ai = graph.activity_index(a);
      for (const auto& s : states) cross[{ai, graph.state_index(s)}] += 1;
    }
    for (std::size_t i = 0; i < sts.size(); ++i)
      for (std::size_t j = i + 1; j < sts.size(); ++j)
        state_pair[{std::min(sts[i], sts[j]), std::max(sts[i], sts[j])}] += 1;
    for (std::size_t i = 0; i < acts.size(); ++i)
      for (std::size_t j = i + 1; j < acts.size(); ++j)
        activity_pair[{std::min(acts[i], acts[j]), std::max(acts[i], acts[j])}] += 1;
  }

  const bool use_npmi = weighting == GraphWeighting::npmi;
  // A pair present in every instance has p(a,s) = 1; npmi's limit there is 1.
  auto weigh = [&](double count, double ca, double cb) {
    if (!use_npmi) return count;
    if (count >= n_instances) return 1.0;
    return npmi_from_counts(count, ca, cb, n_instances);
  };
  for (const auto& [key, count] : cross)
    graph.cross_edges.push_back(
        {key.first, key.second, weigh(count, activity_count[key.first], state_count[key.second])});
  for (const auto& [key, count] : state_pair)
    graph.state_edges.push_back(
        {key.first, key.second, weigh(count, state_count[key.first], state_count[key.second])});
  for (const auto& [key, count] : activity_pair)
    graph.activity_edges.push_back(
        {key.first, key.second, weigh(count, activity_count[key.first], activity_count[key.second])});
  return graph;
}

}  // namespace hake
