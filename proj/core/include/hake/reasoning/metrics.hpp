#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hake/error.hpp"

namespace hake::reasoning {

/// One activity's ranked retrieval data: per test instance a score and a
/// 0/1 relevance bit.
struct EvalRecord {
  struct Item {
    std::string instance_id;
    double score = 0;
    bool relevant = false;
  };
  std::string activity;
  std::vector<Item> items;
};

/// Mean of precision-at-k over the relevant ranks, after a stable sort by
/// (score desc, instance id asc). Requires at least one relevant item.
double average_precision(const EvalRecord& record);

struct MapReport {
  double mean_ap = 0;
  std::map<std::string, double> per_activity;
  std::vector<std::string> skipped;  // activities with zero relevant items
};

/// Unweighted mean AP over activities with at least one relevant item;
/// zero-relevance activities are excluded and flagged in `skipped`.
MapReport mean_ap(const std::vector<EvalRecord>& records);

/// Activities with strictly fewer than `i` training samples. Errors when the
/// subset is empty.
std::set<std::string> few_shot_split(const std::map<std::string, int>& train_counts, int i);

/// mean_ap restricted to the given activity subset.
MapReport mean_ap_subset(const std::vector<EvalRecord>& records,
                         const std::set<std::string>& subset);

// JSONL rows {"instance":..,"activity":..,"score":..,"relevant":0|1} grouped
// into per-activity records (activity order sorted, item order preserved).
std::vector<EvalRecord> load_eval_jsonl(const std::string& path);

/// CSV "activity,count" per line with a header.
std::map<std::string, int> load_train_counts_csv(const std::string& path);

}  // namespace hake::reasoning
