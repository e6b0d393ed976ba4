#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hake/knowledge.hpp"

namespace hake {

/// One annotator's part-state vote for one (instance, activity).
struct AnnotationRound {
  std::string annotator_id;
  std::string instance_id;
  ActivityLabel activity;
  std::set<PartStateTriple> states;

  bool operator==(const AnnotationRound&) const = default;
  void validate() const {
    if (states.empty()) throw DataError("annotation round: states must be non-empty");
  }
};

/// Conditional state frequencies learned from the expert seed set.
/// Probabilities are per-state (multi-label), not a distribution over states.
struct SeedDistribution {
  std::map<ActivityLabel, std::map<PartStateTriple, double>> prob;
};

/// p(s | a) = #rounds for a containing s / #rounds for a.
SeedDistribution fit_seed_distribution(const std::vector<AnnotationRound>& seed);

/// All states with p(s | activity) >= threshold (inclusive).
std::set<PartStateTriple> propose_initial_labels(const SeedDistribution& dist,
                                                 const ActivityLabel& activity, double threshold);

/// Support-threshold consolidation of >= 2 rounds for one (instance,
/// activity): a state survives iff it appears in at least min_support of the
/// rounds (inclusive). Rounds must agree on instance and activity.
std::set<PartStateTriple> agreement_filter(const std::vector<AnnotationRound>& rounds,
                                           double min_support = 0.5);

/// Final-round combination: per-part union of states across activities.
std::map<BodyPart, std::set<PartStateTriple>> merge_rounds(
    const std::map<ActivityLabel, std::set<PartStateTriple>>& per_activity);

}  // namespace hake
