#include "hake/annotation.hpp"

namespace hake {

SeedDistribution fit_seed_distribution(const std::vector<AnnotationRound>& seed) {
  if (seed.empty()) throw Error("fit_seed_distribution: empty seed set");
  std::map<ActivityLabel, double> rounds_per_activity;
  std::map<ActivityLabel, std::map<PartStateTriple, double>> state_hits;
  for (const auto& round : seed) {
    round.validate();
    rounds_per_activity[round.activity] += 1;
    for (const auto& s : round.states) state_hits[round.activity][s] += 1;
  }
  SeedDistribution dist;
  for (const auto& [activity, hits] : state_hits) {
    const double denom = rounds_per_activity[activity];
    for (const auto& [state, count] : hits) dist.prob[activity][state] = count / denom;
  }
  // Activities whose rounds exist but share no states still get an entry.
  for (const auto& [activity, _] : rounds_per_activity) dist.prob.try_emplace(activity);
  return dist;
}

std::set<PartStateTriple> propose_initial_labels(const SeedDistribution& dist,
                                                 const ActivityLabel& activity,
                                                 double threshold) {
  auto it = dist.prob.find(activity);
  if (it == dist.prob.end())
    throw Error("propose_initial_labels: unknown activity '" + activity.token() + "'");
  std::set<PartStateTriple> out;
  for (const auto& [state, p] : it->second)
    if (p >= threshold) out.insert(state);
  return out;
}

std::set<PartStateTriple> agreement_filter(const std::vector<AnnotationRound>& rounds,
                                           double min_support) {
  if (rounds.size() < 2) throw Error("agreement_filter: insufficient agreement data");
  for (const auto& round : rounds) {
    round.validate();
    if (round.instance_id != rounds.front().instance_id ||
        round.activity != rounds.front().activity)
      throw Error("agreement_filter: rounds span more than one (instance, activity)");
  }
  std::map<PartStateTriple, int> votes;
  for (const auto& round : rounds)
    for (const auto& s : round.states) votes[s] += 1;
  std::set<PartStateTriple> out;
  const double n = static_cast<double>(rounds.size());
  for (const auto& [state, count] : votes)
    if (count / n >= min_support) out.insert(state);
  return out;
}

std::map<BodyPart, std::set<PartStateTriple>> merge_rounds(
    const std::map<ActivityLabel, std::set<PartStateTriple>>& per_activity) {
  std::map<BodyPart, std::set<PartStateTriple>> merged;
  for (const auto& [activity, states] : per_activity)
    for (const auto& s : states) merged[s.part].insert(s);
  return merged;
}

}  // namespace hake
