#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "drpose/augment.hpp"
#include "drpose/skeleton.hpp"

namespace drpose {

// Closed interval of one Euler angle, radians.
struct AngleRange {
  double lo = 0.0;
  double hi = 0.0;
};

// X, Y, Z Euler ranges of the rotation applied at a bone's parent joint.
using JointAngleRanges = std::array<AngleRange, 3>;

struct SyntheticMotionConfig {
  int num_poses = 1000;
  int num_subjects = 1;
  // Indexed by the child joint of each bone. The root entry holds the
  // global body orientation.
  std::array<JointAngleRanges, kNumJoints> angles{};
  std::array<double, kNumJoints> bone_lengths = default_bone_lengths();
  // Each subject scales all bones by a factor drawn from [1 - s, 1 + s].
  double subject_scale_spread = 0.0;
  Vec3 root_position{0.0, 1000.0, 0.0};
  std::uint64_t seed = 0;

  // Throws ConfigError for out-of-bounds ranges or non-positive lengths.
  void validate() const;

  // Joint limits that roughly follow human range of motion, with the body
  // free to face any direction about the vertical axis.
  static SyntheticMotionConfig anthropometric();
};

// Rest direction of each bone in the parent frame: standing upright, arms
// hanging, facing +z.
Vec3 rest_direction(int joint);

// Bone lengths of one subject after scaling.
std::array<double, kNumJoints> subject_bone_lengths(const SyntheticMotionConfig& cfg, int subject);

Pose3D forward_kinematics(const std::array<Vec3, kNumJoints>& euler,
                          const std::array<double, kNumJoints>& lengths, const Vec3& root_position);

// num_poses world-frame poses, subjects assigned round-robin.
std::vector<WorldPose> generate_motion(const SyntheticMotionConfig& cfg);

}  // namespace drpose
