#include "hake/part_boxes.hpp"

#include <algorithm>
#include <cmath>

namespace hake {

namespace {

bool confident(const PoseKeypoints& kp, int index) {
  return index >= 0 && index < static_cast<int>(kp.joints.size()) &&
         kp.joints[index].confidence > 0;
}

}  // namespace

std::map<BodyPart, Box> part_boxes_from_pose(const PoseKeypoints& keypoints,
                                             const Box& person_box, const PoseSchema& schema) {
  person_box.validate();
  keypoints.validate();
  bool any = false;
  for (const auto& j : keypoints.joints) any = any || j.confidence > 0;
  if (!any) throw DataError("part boxes: no usable keypoints");

  // Torso length from shoulder/hip midpoints; fallback scale when any of
  // the four torso joints is missing.
  double scale;
  if (confident(keypoints, schema.left_shoulder) && confident(keypoints, schema.right_shoulder) &&
      confident(keypoints, schema.left_hip) && confident(keypoints, schema.right_hip)) {
    const auto& ls = keypoints.joints[schema.left_shoulder];
    const auto& rs = keypoints.joints[schema.right_shoulder];
    const auto& lh = keypoints.joints[schema.left_hip];
    const auto& rh = keypoints.joints[schema.right_hip];
    const double sx = (ls.x + rs.x) / 2, sy = (ls.y + rs.y) / 2;
    const double hx = (lh.x + rh.x) / 2, hy = (lh.y + rh.y) / 2;
    scale = std::hypot(sx - hx, sy - hy);
  } else {
    scale = 0.5 * std::max(person_box.width(), person_box.height());
  }
  if (scale <= 0) scale = 0.5 * std::max(person_box.width(), person_box.height());

  std::map<BodyPart, Box> boxes;
  for (BodyPart part : all_body_parts()) {
    const int anchor = schema.anchor[static_cast<int>(part)];
    if (!confident(keypoints, anchor)) continue;
    const auto& joint = keypoints.joints[anchor];
    const double side = schema.alpha[static_cast<int>(part)] * scale;
    const double cx = std::clamp(joint.x, person_box.x_min, person_box.x_max);
    const double cy = std::clamp(joint.y, person_box.y_min, person_box.y_max);
    Box box{std::max(cx - side / 2, person_box.x_min), std::max(cy - side / 2, person_box.y_min),
            std::min(cx + side / 2, person_box.x_max), std::min(cy + side / 2, person_box.y_max)};
    box.validate();
    boxes.emplace(part, box);
  }
  return boxes;
}

}  // namespace hake
