#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hake/error.hpp"

namespace hake {

/// Joint and marginal counts between activities and part-state candidates.
struct CooccurrenceTable {
  double total = 0;  // N
  std::map<std::string, double> activity_counts;
  std::map<std::string, double> state_counts;
  std::map<std::pair<std::string, std::string>, double> joint_counts;

  double joint(const std::string& a, const std::string& s) const {
    auto it = joint_counts.find({a, s});
    return it == joint_counts.end() ? 0.0 : it->second;
  }

  /// Counts must be non-negative, marginals positive and bounded by N,
  /// joints bounded by both marginals.
  void validate() const;

  /// counts CSV: header activity,state,joint_count.
  /// marginals CSV: header kind,token,count with kinds activity/state/total.
  static CooccurrenceTable load_csv(const std::string& counts_path,
                                    const std::string& marginals_path);
  void save_csv(const std::string& counts_path, const std::string& marginals_path) const;
};

enum class NpmiAggregate { max, mean };

struct NpmiOptions {
  /// Additive smoothing applied to a zero joint count (N grows by the same
  /// amount); positive joints are left exact.
  double epsilon = 0.5;
  NpmiAggregate aggregate = NpmiAggregate::max;
};

/// Count-level kernels shared with the knowledge graph. A zero joint count
/// is smoothed to epsilon (the total grows by epsilon as well); positive
/// joints stay exact so the ratio arithmetic is reproducible.
double pmi_from_counts(double joint, double count_a, double count_b, double total,
                       double epsilon = 0.5);
double npmi_from_counts(double joint, double count_a, double count_b, double total,
                        double epsilon = 0.5);

/// ln( p(a,s) / (p(a) p(s)) ), natural log, computed from counts so that
/// independence gives exactly 0.
double pmi(const CooccurrenceTable& table, const std::string& activity, const std::string& state,
           const NpmiOptions& opts = {});

/// pmi normalized by -ln p(a,s); in [-1, 1], exactly 1 when
/// p(a,s) = p(a) = p(s) and exactly 0 under independence.
double npmi(const CooccurrenceTable& table, const std::string& activity, const std::string& state,
            const NpmiOptions& opts = {});

/// Candidates ranked by their best NPMI against any activity (descending,
/// ties broken lexicographically); returns the top k with scores.
std::vector<std::pair<std::string, double>> select_part_states(const CooccurrenceTable& table,
                                                               int k,
                                                               const NpmiOptions& opts = {});

}  // namespace hake
