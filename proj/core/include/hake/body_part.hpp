#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace hake {

/// The ten-part body decomposition. Declaration order is the fixed total
/// order used everywhere (serialization, map iteration, graph node order).
enum class BodyPart : std::uint8_t {
  head,
  left_arm,
  right_arm,
  left_hand,
  right_hand,
  hip,
  left_leg,
  right_leg,
  left_foot,
  right_foot,
};

inline constexpr int kBodyPartCount = 10;

inline constexpr std::array<BodyPart, kBodyPartCount> all_body_parts() {
  return {BodyPart::head,      BodyPart::left_arm,  BodyPart::right_arm, BodyPart::left_hand,
          BodyPart::right_hand, BodyPart::hip,       BodyPart::left_leg,  BodyPart::right_leg,
          BodyPart::left_foot, BodyPart::right_foot};
}

const std::string& to_string(BodyPart part);

/// Throws hake::DataError on an unknown name.
BodyPart body_part_from_string(const std::string& name);

}  // namespace hake
