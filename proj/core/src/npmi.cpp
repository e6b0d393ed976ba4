#include "hake/npmi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hake {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_count(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("count table: bad number '" + s + "' in " + where);
  }
}

}  // namespace

void CooccurrenceTable::validate() const {
  if (total < 0) throw DataError("count table: negative total");
  for (const auto& [a, c] : activity_counts) {
    if (c <= 0) throw DataError("count table: non-positive marginal for activity '" + a + "'");
    if (c > total) throw DataError("count table: activity marginal exceeds total");
  }
  for (const auto& [s, c] : state_counts) {
    if (c <= 0) throw DataError("count table: non-positive marginal for state '" + s + "'");
    if (c > total) throw DataError("count table: state marginal exceeds total");
  }
  for (const auto& [pair, c] : joint_counts) {
    if (c < 0) throw DataError("count table: negative joint count");
    auto a = activity_counts.find(pair.first);
    auto s = state_counts.find(pair.second);
    if (a == activity_counts.end())
      throw DataError("count table: joint references unknown activity '" + pair.first + "'");
    if (s == state_counts.end())
      throw DataError("count table: joint references unknown state '" + pair.second + "'");
    if (c > std::min(a->second, s->second))
      throw DataError("count table: joint count exceeds marginal for (" + pair.first + ", " +
                      pair.second + ")");
  }
}

double pmi_from_counts(double joint, double count_a, double count_b, double total,
                       double epsilon) {
  if (total <= 0) throw Error("pmi: empty table");
  if (count_a <= 0 || count_b <= 0) throw Error("pmi: zero marginal count");
  double j = joint, n = total;
  if (joint <= 0) {
    if (epsilon <= 0) throw Error("pmi: zero joint count and no smoothing");
    j = epsilon;
    n += epsilon;
  }
  // ln(p(a,b) / (p(a) p(b))) as a single ratio of count products: exact 0
  // under independence.
  return std::log((j * n) / (count_a * count_b));
}

double npmi_from_counts(double joint, double count_a, double count_b, double total,
                        double epsilon) {
  const double value = pmi_from_counts(joint, count_a, count_b, total, epsilon);
  double j = joint, n = total;
  if (joint <= 0) {
    j = epsilon;
    n += epsilon;
  }
  if (j >= n) throw Error("npmi: degenerate joint probability");
  // Same expression family as pmi so the perfect-co-occurrence case divides
  // two bitwise-identical logs.
  return value / std::log(n / j);
}

namespace {

void require_known(const CooccurrenceTable& table, const std::string& activity,
                   const std::string& state) {
  if (table.total <= 0) throw Error("pmi: empty table");
  if (!table.activity_counts.contains(activity))
    throw Error("count table: unknown activity '" + activity + "'");
  if (!table.state_counts.contains(state))
    throw Error("count table: unknown state '" + state + "'");
}

}  // namespace

double pmi(const CooccurrenceTable& table, const std::string& activity, const std::string& state,
           const NpmiOptions& opts) {
  require_known(table, activity, state);
  return pmi_from_counts(table.joint(activity, state), table.activity_counts.at(activity),
                         table.state_counts.at(state), table.total, opts.epsilon);
}

double npmi(const CooccurrenceTable& table, const std::string& activity, const std::string& state,
            const NpmiOptions& opts) {
  require_known(table, activity, state);
  return npmi_from_counts(table.joint(activity, state), table.activity_counts.at(activity),
                          table.state_counts.at(state), table.total, opts.epsilon);
}

std::vector<std::pair<std::string, double>> select_part_states(const CooccurrenceTable& table,
                                                               int k, const NpmiOptions& opts) {
  if (k <= 0) throw Error("select_part_states: k must be positive");
  if (k > static_cast<int>(table.state_counts.size()))
    throw Error("select_part_states: k = " + std::to_string(k) + " exceeds candidate count " +
                std::to_string(table.state_counts.size()));

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(table.state_counts.size());
  for (const auto& [state, _] : table.state_counts) {
    double best = 0;
    double sum = 0;
    bool first = true;
    for (const auto& [activity, __] : table.activity_counts) {
      const double v = npmi(table, activity, state, opts);
      sum += v;
      if (first || v > best) best = v;
      first = false;
    }
    if (first) throw Error("select_part_states: table has no activities");
    const double score =
        opts.aggregate == NpmiAggregate::max ? best : sum / table.activity_counts.size();
    scored.emplace_back(state, score);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& lhs, const auto& rhs) {
    if (lhs.second != rhs.second) return lhs.second > rhs.second;
    return lhs.first < rhs.first;
  });
  scored.resize(static_cast<std::size_t>(k));
  return scored;
}

CooccurrenceTable CooccurrenceTable::load_csv(const std::string& counts_path,
                                              const std::string& marginals_path) {
  CooccurrenceTable table;

  std::ifstream ms(marginals_path);
  if (!ms) throw DataError("count table: cannot open " + marginals_path);
  std::string line;
  if (!std::getline(ms, line) || split_csv_row(line) != std::vector<std::string>{"kind", "token", "count"})
    throw DataError("count table: bad marginals header in " + marginals_path);
  int lineno = 1;
  while (std::getline(ms, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() != 3)
      throw DataError("count table: expected 3 fields at " + marginals_path + ":" +
                      std::to_string(lineno));
    const double c = parse_count(f[2], marginals_path + ":" + std::to_string(lineno));
    if (f[0] == "activity")
      table.activity_counts[f[1]] = c;
    else if (f[0] == "state")
      table.state_counts[f[1]] = c;
    else if (f[0] == "total")
      table.total = c;
    else
      throw DataError("count table: unknown kind '" + f[0] + "' at " + marginals_path + ":" +
                      std::to_string(lineno));
  }

  std::ifstream cs(counts_path);
  if (!cs) throw DataError("count table: cannot open " + counts_path);
  if (!std::getline(cs, line) ||
      split_csv_row(line) != std::vector<std::string>{"activity", "state", "joint_count"})
    throw DataError("count table: bad counts header in " + counts_path);
  lineno = 1;
  while (std::getline(cs, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_row(line);
    if (f.size() != 3)
      throw DataError("count table: expected 3 fields at " + counts_path + ":" +
                      std::to_string(lineno));
    table.joint_counts[{f[0], f[1]}] =
        parse_count(f[2], counts_path + ":" + std::to_string(lineno));
  }

  table.validate();
  return table;
}

void CooccurrenceTable::save_csv(const std::string& counts_path,
                                 const std::string& marginals_path) const {
  std::ofstream ms(marginals_path);
  if (!ms) throw DataError("count table: cannot open " + marginals_path + " for writing");
  ms << "kind,token,count\n";
  ms << "total,," << total << "\n";
  for (const auto& [a, c] : activity_counts) ms << "activity," << a << "," << c << "\n";
  for (const auto& [s, c] : state_counts) ms << "state," << s << "," << c << "\n";

  std::ofstream cs(counts_path);
  if (!cs) throw DataError("count table: cannot open " + counts_path + " for writing");
  cs << "activity,state,joint_count\n";
  for (const auto& [pair, c] : joint_counts)
    cs << pair.first << "," << pair.second << "," << c << "\n";
}

}  // namespace hake
