#pragma once

#include <array>

#include "drpose/skeleton.hpp"

namespace drpose {

struct Camera;

Pose2D project_orthogonal(const Pose3D& pose);

// Pinhole projection of a pose already expressed in the camera frame of
// `cam`, i.e. (x, y) = focal * (X / Z, Y / Z). Throws ProjectionError if any
// joint has Z <= 0.
Pose2D project_perspective_camera_frame(const Pose3D& pose_camera, double focal);

// Transforms a world-frame pose into the camera frame, then projects it.
Pose2D project_perspective(const Pose3D& pose_world, const Camera& cam);

struct DepthMagnitude {
  double value = 0.0;
  bool clamped = false;
};

// |dz| between two adjacent joints from the bone length and their 2D offset.
// A negative radicand is clamped to zero and flagged.
DepthMagnitude adjacent_depth_magnitude(double bone_length, double dx, double dy);

struct Reconstruction {
  Pose3D pose;
  // clamped[j] is set when the bone ending at j could not reach its 2D
  // offset and its depth step was clamped to zero.
  std::array<bool, kNumJoints> clamped{};

  int num_clamped() const;
};

// Closed-form depth recovery along the kinematic tree under orthogonal
// projection. (x, y) come from p2d; each child is placed in front of or
// behind its parent according to m(child, parent).
Reconstruction reconstruct_depths(const Pose2D& p2d, const RankingMatrix& m,
                                  const SkeletonTopology& topo, double root_depth);

double mpjpe(const Pose3D& pred, const Pose3D& gt);
std::array<double, kNumJoints> per_joint_error(const Pose3D& pred, const Pose3D& gt);

struct Alignment {
  Pose3D aligned;
  double error = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;
};

// Similarity (rotation, translation, uniform scale) alignment of pred onto gt
// minimizing squared error. Throws DegenerateError when either pose has all
// joints coincident.
Alignment procrustes_align(const Pose3D& pred, const Pose3D& gt);

}  // namespace drpose
