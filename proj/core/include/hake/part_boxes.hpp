#pragma once

#include <array>
#include <map>

#include "hake/knowledge.hpp"

namespace hake {

/// Which joint anchors each body part, and where the torso joints live.
/// Indices follow the 17-joint convention by default: 0 nose, 5/6 shoulders,
/// 7/8 elbows, 9/10 wrists, 11/12 hips, 13/14 knees, 15/16 ankles.
struct PoseSchema {
  int joint_count = 17;
  std::array<int, kBodyPartCount> anchor = {0, 7, 8, 9, 10, 11, 13, 14, 15, 16};
  int left_shoulder = 5, right_shoulder = 6;
  int left_hip = 11, right_hip = 12;
  /// Box side = alpha[part] * torso length.
  std::array<double, kBodyPartCount> alpha = {1.0, 1.2, 1.2, 0.7, 0.7, 1.0, 1.2, 1.2, 0.7, 0.7};
};

/// Square part boxes centered on each part's anchor keypoint, side
/// alpha * torso length (shoulder midpoint to hip midpoint). When the torso
/// joints are not all confident the scale falls back to half the larger
/// person-box side. Centers are clamped into the person box, then the box is
/// intersected with it. Parts whose anchor has zero confidence are absent.
/// Throws when no keypoint has positive confidence.
std::map<BodyPart, Box> part_boxes_from_pose(const PoseKeypoints& keypoints,
                                             const Box& person_box,
                                             const PoseSchema& schema = {});

}  // namespace hake
