#include "hake/reasoning/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace hake::reasoning {

double average_precision(const EvalRecord& record) {
  bool any_relevant = false;
  for (const auto& item : record.items) any_relevant = any_relevant || item.relevant;
  if (!any_relevant)
    throw Error("average_precision: no relevant items for activity '" + record.activity + "'");

  std::vector<const EvalRecord::Item*> ranked;
  ranked.reserve(record.items.size());
  for (const auto& item : record.items) ranked.push_back(&item);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const EvalRecord::Item* a, const EvalRecord::Item* b) {
                     if (a->score != b->score) return a->score > b->score;
                     return a->instance_id < b->instance_id;
                   });

  double sum = 0;
  int relevant_seen = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k]->relevant) {
      ++relevant_seen;
      sum += static_cast<double>(relevant_seen) / static_cast<double>(k + 1);
    }
  }
  return sum / relevant_seen;
}

MapReport mean_ap(const std::vector<EvalRecord>& records) {
  MapReport report;
  double sum = 0;
  int counted = 0;
  for (const auto& record : records) {
    bool any_relevant = false;
    for (const auto& item : record.items) any_relevant = any_relevant || item.relevant;
    if (!any_relevant) {
      report.skipped.push_back(record.activity);
      continue;
    }
    const double ap = average_precision(record);
    report.per_activity[record.activity] = ap;
    sum += ap;
    ++counted;
  }
  if (counted == 0) throw Error("mean_ap: no activity has a relevant item");
  report.mean_ap = sum / counted;
  return report;
}

std::set<std::string> few_shot_split(const std::map<std::string, int>& train_counts, int i) {
  if (i <= 0) throw Error("few_shot_split: threshold must be positive");
  std::set<std::string> subset;
  for (const auto& [activity, count] : train_counts) {
    if (count < 0) throw Error("few_shot_split: negative count for '" + activity + "'");
    if (count < i) subset.insert(activity);
  }
  if (subset.empty())
    throw Error("few_shot_split: no few-shot categories at threshold " + std::to_string(i));
  return subset;
}

MapReport mean_ap_subset(const std::vector<EvalRecord>& records,
                         const std::set<std::string>& subset) {
  std::vector<EvalRecord> filtered;
  for (const auto& record : records)
    if (subset.contains(record.activity)) filtered.push_back(record);
  if (filtered.empty()) throw Error("mean_ap_subset: no eval records for the requested subset");
  return mean_ap(filtered);
}

std::vector<EvalRecord> load_eval_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("eval records: cannot open " + path);
  std::map<std::string, EvalRecord> by_activity;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      const std::string activity = j.at("activity").get<std::string>();
      EvalRecord& record = by_activity[activity];
      record.activity = activity;
      const int rel = j.at("relevant").get<int>();
      if (rel != 0 && rel != 1)
        throw DataError("relevance must be 0 or 1");
      record.items.push_back(
          {j.at("instance").get<std::string>(), j.at("score").get<double>(), rel == 1});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<EvalRecord> records;
  records.reserve(by_activity.size());
  for (auto& [_, record] : by_activity) records.push_back(std::move(record));
  return records;
}

std::map<std::string, int> load_train_counts_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("train counts: cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || (line != "activity,count" && line != "activity,count\r"))
    throw DataError("train counts: expected header 'activity,count' in " + path);
  std::map<std::string, int> counts;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos)
      throw DataError("train counts: missing comma at " + path + ":" + std::to_string(lineno));
    try {
      counts[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw DataError("train counts: bad count at " + path + ":" + std::to_string(lineno));
    }
  }
  return counts;
}

}  // namespace hake::reasoning
