#include "hake/jsonl.hpp"

#include <fstream>

#include <json.hpp>

namespace hake {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json box_to_json(const Box& b) { return ordered_json{b.x_min, b.y_min, b.x_max, b.y_max}; }

Box box_from_json(const ordered_json& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("box: expected [x_min,y_min,x_max,y_max]");
  Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  b.validate();
  return b;
}

ordered_json activity_to_json(const ActivityLabel& a) {
  return ordered_json{{"verb", a.verb}, {"object", a.object}};
}

ActivityLabel activity_from_json(const ordered_json& j) {
  return ActivityLabel{j.at("verb").get<std::string>(), j.at("object").get<std::string>()};
}

ordered_json triple_to_json(const PartStateTriple& s) {
  return ordered_json{{"part", to_string(s.part)}, {"verb", s.verb}, {"object", s.object}};
}

PartStateTriple triple_from_json(const ordered_json& j) {
  return PartStateTriple{body_part_from_string(j.at("part").get<std::string>()),
                         j.at("verb").get<std::string>(), j.at("object").get<std::string>()};
}

void reject_unknown_keys(const ordered_json& j, std::initializer_list<const char*> known,
                         const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw DataError(what + ": unknown key '" + key + "'");
  }
}

ordered_json parse_line(const std::string& line, const std::string& what) {
  try {
    return ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(what + ": " + e.what());
  }
}

}  // namespace

std::string encode_person(const PersonInstance& instance) {
  instance.validate();
  ordered_json j;
  j["person_box"] = box_to_json(instance.person_box);
  if (instance.keypoints) {
    ordered_json kps = ordered_json::array();
    for (const auto& joint : instance.keypoints->joints)
      kps.push_back(ordered_json{joint.x, joint.y, joint.confidence});
    j["keypoints"] = std::move(kps);
  }
  ordered_json boxes = ordered_json::object();
  for (const auto& [part, box] : instance.part_boxes) boxes[to_string(part)] = box_to_json(box);
  j["part_boxes"] = std::move(boxes);
  ordered_json acts = ordered_json::array();
  for (const auto& a : instance.activities) acts.push_back(activity_to_json(a));
  j["activities"] = std::move(acts);
  ordered_json ps = ordered_json::array();
  for (const auto& [activity, states] : instance.part_states) {
    ordered_json entry;
    entry["activity"] = activity_to_json(activity);
    ordered_json list = ordered_json::array();
    for (const auto& s : states) list.push_back(triple_to_json(s));
    entry["states"] = std::move(list);
    ps.push_back(std::move(entry));
  }
  j["part_states"] = std::move(ps);
  return j.dump();
}

PersonInstance decode_person(const std::string& json_line) {
  const ordered_json j = parse_line(json_line, "person instance");
  reject_unknown_keys(j, {"person_box", "keypoints", "part_boxes", "activities", "part_states"},
                      "person instance");
  PersonInstance inst;
  inst.person_box = box_from_json(j.at("person_box"));
  if (j.contains("keypoints")) {
    PoseKeypoints kp;
    for (const auto& row : j.at("keypoints")) {
      if (!row.is_array() || row.size() != 3)
        throw DataError("person instance: keypoint rows are [x,y,confidence]");
      kp.joints.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    inst.keypoints = std::move(kp);
  }
  if (j.contains("part_boxes"))
    for (const auto& [name, box] : j.at("part_boxes").items())
      inst.part_boxes.emplace(body_part_from_string(name), box_from_json(box));
  for (const auto& a : j.at("activities")) inst.activities.insert(activity_from_json(a));
  if (j.contains("part_states"))
    for (const auto& entry : j.at("part_states")) {
      reject_unknown_keys(entry, {"activity", "states"}, "person instance part_states entry");
      std::set<PartStateTriple> states;
      for (const auto& s : entry.at("states")) states.insert(triple_from_json(s));
      inst.part_states.emplace(activity_from_json(entry.at("activity")), std::move(states));
    }
  inst.validate();
  return inst;
}

std::string encode_round(const AnnotationRound& round) {
  round.validate();
  ordered_json j;
  j["annotator_id"] = round.annotator_id;
  j["instance_id"] = round.instance_id;
  j["activity"] = activity_to_json(round.activity);
  ordered_json list = ordered_json::array();
  for (const auto& s : round.states) list.push_back(triple_to_json(s));
  j["states"] = std::move(list);
  return j.dump();
}

AnnotationRound decode_round(const std::string& json_line) {
  const ordered_json j = parse_line(json_line, "annotation round");
  reject_unknown_keys(j, {"annotator_id", "instance_id", "activity", "states"},
                      "annotation round");
  AnnotationRound round;
  round.annotator_id = j.at("annotator_id").get<std::string>();
  round.instance_id = j.at("instance_id").get<std::string>();
  round.activity = activity_from_json(j.at("activity"));
  for (const auto& s : j.at("states")) round.states.insert(triple_from_json(s));
  round.validate();
  return round;
}

namespace {

template <class T, class Decode>
std::vector<T> load_jsonl(const std::string& path, Decode&& decode, const std::string& what) {
  std::ifstream is(path);
  if (!is) throw DataError(what + ": cannot open " + path);
  std::vector<T> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(decode(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<PersonInstance> load_person_jsonl(const std::string& path) {
  return load_jsonl<PersonInstance>(path, decode_person, "person instances");
}

void save_person_jsonl(const std::vector<PersonInstance>& instances, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("person instances: cannot open " + path + " for writing");
  for (const auto& inst : instances) os << encode_person(inst) << "\n";
}

std::vector<AnnotationRound> load_round_jsonl(const std::string& path) {
  return load_jsonl<AnnotationRound>(path, decode_round, "annotation rounds");
}

void save_round_jsonl(const std::vector<AnnotationRound>& rounds, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("annotation rounds: cannot open " + path + " for writing");
  for (const auto& r : rounds) os << encode_round(r) << "\n";
}

}  // namespace hake
