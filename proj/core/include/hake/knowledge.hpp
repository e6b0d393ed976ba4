#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hake/body_part.hpp"
#include "hake/error.hpp"

namespace hake {

/// Reserved object token for object-free actions.
inline const std::string kNoneToken = "NONE";

/// Atomic body-part-level action: <part, verb, object>.
struct PartStateTriple {
  BodyPart part = BodyPart::head;
  std::string verb;
  std::string object = kNoneToken;

  auto operator<=>(const PartStateTriple&) const = default;
  std::string token() const;  // "right_hand:hold:wheel", unique per triple
};

/// Person-level action label, possibly object-directed.
struct ActivityLabel {
  std::string verb;
  std::string object = kNoneToken;

  auto operator<=>(const ActivityLabel&) const = default;
  std::string token() const;  // "drive:car"
};

/// Axis-aligned pixel box; min strictly below max on both axes.
struct Box {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  bool operator==(const Box&) const = default;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  void validate() const {
    if (!(x_min < x_max) || !(y_min < y_max))
      throw DataError("box: min must be strictly below max");
  }
};

/// Ordered joint list. The joint schema (count and anchor meaning) is
/// configuration; the default is the 17-joint convention.
struct PoseKeypoints {
  struct Joint {
    double x = 0, y = 0, confidence = 0;
    bool operator==(const Joint&) const = default;
  };
  std::vector<Joint> joints;

  bool operator==(const PoseKeypoints&) const = default;
  void validate() const {
    for (const auto& j : joints)
      if (j.confidence < 0 || j.confidence > 1)
        throw DataError("keypoints: confidence must be in [0,1]");
  }
};

/// One annotated person: boxes, activities, and per-activity part states.
struct PersonInstance {
  Box person_box;
  std::optional<PoseKeypoints> keypoints;
  std::map<BodyPart, Box> part_boxes;
  std::set<ActivityLabel> activities;
  std::map<ActivityLabel, std::set<PartStateTriple>> part_states;

  bool operator==(const PersonInstance&) const = default;

  /// Every part_states key must be one of the instance's activities.
  void validate() const;

  /// Union of part states across all activities.
  std::set<PartStateTriple> merged_states() const;
};

/// Newline-free token list; line index in the file is the token id.
struct Vocabulary {
  std::vector<std::string> tokens;

  int id(const std::string& token) const;  // -1 if absent
  bool contains(const std::string& token) const { return id(token) >= 0; }
  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace hake
