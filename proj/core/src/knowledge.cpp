#include "hake/knowledge.hpp"

#include <algorithm>
#include <fstream>

namespace hake {

std::string PartStateTriple::token() const {
  return to_string(part) + ":" + verb + ":" + object;
}

std::string ActivityLabel::token() const { return verb + ":" + object; }

void PersonInstance::validate() const {
  person_box.validate();
  if (keypoints) keypoints->validate();
  for (const auto& [part, box] : part_boxes) box.validate();
  for (const auto& [activity, states] : part_states)
    if (!activities.contains(activity))
      throw DataError("person instance: part_states key '" + activity.token() +
                      "' is not in activities");
}

std::set<PartStateTriple> PersonInstance::merged_states() const {
  std::set<PartStateTriple> merged;
  for (const auto& [activity, states] : part_states) merged.insert(states.begin(), states.end());
  return merged;
}

int Vocabulary::id(const std::string& token) const {
  auto it = std::find(tokens.begin(), tokens.end(), token);
  return it == tokens.end() ? -1 : static_cast<int>(it - tokens.begin());
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("vocabulary: cannot open " + path);
  Vocabulary vocab;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.tokens.push_back(line);
  }
  return vocab;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw DataError("vocabulary: cannot open " + path + " for writing");
  for (const auto& t : tokens) os << t << "\n";
}

}  // namespace hake
