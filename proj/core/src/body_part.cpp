#include "hake/body_part.hpp"

#include <unordered_map>

#include "hake/error.hpp"

namespace hake {

namespace {
const std::array<std::string, kBodyPartCount> kNames = {
    "head",     "left_arm", "right_arm", "left_hand", "right_hand",
    "hip",      "left_leg", "right_leg", "left_foot", "right_foot"};
}

const std::string& to_string(BodyPart part) { return kNames[static_cast<int>(part)]; }

BodyPart body_part_from_string(const std::string& name) {
  static const std::unordered_map<std::string, BodyPart> lookup = [] {
    std::unordered_map<std::string, BodyPart> m;
    for (BodyPart p : all_body_parts()) m.emplace(kNames[static_cast<int>(p)], p);
    return m;
  }();
  auto it = lookup.find(name);
  if (it == lookup.end()) throw DataError("unknown body part: " + name);
  return it->second;
}

}  // namespace hake
