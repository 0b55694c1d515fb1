#include "drpose/motion.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "drpose/errors.hpp"

namespace drpose {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Mat3 euler_xyz(const Vec3& e) {
  return (Eigen::AngleAxisd(e.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(e.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(e.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

JointAngleRanges deg(double xlo, double xhi, double ylo, double yhi, double zlo, double zhi) {
  return {AngleRange{xlo * kDeg, xhi * kDeg}, AngleRange{ylo * kDeg, yhi * kDeg},
          AngleRange{zlo * kDeg, zhi * kDeg}};
}

}  // namespace

void SyntheticMotionConfig::validate() const {
  if (num_poses < 1) throw ConfigError("motion: num_poses must be >= 1");
  if (num_subjects < 1) throw ConfigError("motion: num_subjects must be >= 1");
  if (!(subject_scale_spread >= 0.0 && subject_scale_spread < 0.5))
    throw ConfigError("motion: subject_scale_spread must lie in [0, 0.5)");
  if (!root_position.allFinite()) throw ConfigError("motion: root position must be finite");
  for (int j = 0; j < kNumJoints; ++j) {
    for (const auto& r : angles[static_cast<std::size_t>(j)]) {
      if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi ||
          r.lo < -std::numbers::pi || r.hi > std::numbers::pi)
        throw ConfigError("motion: angle range of " + std::string(joint_name(j)) +
                          " must satisfy -pi <= lo <= hi <= pi");
    }
    if (j != kRootJoint && !(bone_lengths[static_cast<std::size_t>(j)] > 0.0))
      throw ConfigError("motion: bone length of " + std::string(joint_name(j)) + " must be positive");
  }
}

SyntheticMotionConfig SyntheticMotionConfig::anthropometric() {
  SyntheticMotionConfig c;
  using J = Joint;
  auto at = [&](J j) -> JointAngleRanges& { return c.angles[static_cast<std::size_t>(j)]; };
  at(J::RAnkle) = deg(0, 130, 0, 0, 0, 0);          // knee flexion
  at(J::LAnkle) = deg(0, 130, 0, 0, 0, 0);
  at(J::RKnee) = deg(-100, 40, -30, 30, -35, 10);   // hip
  at(J::LKnee) = deg(-100, 40, -30, 30, -10, 35);
  at(J::RHip) = deg(-5, 5, -5, 5, -5, 5);
  at(J::LHip) = deg(-5, 5, -5, 5, -5, 5);
  at(J::Pelvis) = deg(-10, 10, -180, 180, -10, 10);  // body orientation
  at(J::Thorax) = deg(-20, 45, -30, 30, -20, 20);    // spine
  at(J::UpperNeck) = deg(-20, 30, -40, 40, -15, 15);
  at(J::HeadTop) = deg(-20, 30, 0, 0, -10, 10);
  at(J::RWrist) = deg(-140, 0, 0, 0, 0, 0);          // elbow flexion
  at(J::LWrist) = deg(-140, 0, 0, 0, 0, 0);
  at(J::RElbow) = deg(-170, 60, -60, 60, -90, 10);   // shoulder
  at(J::LElbow) = deg(-170, 60, -60, 60, -10, 90);
  at(J::RShoulder) = deg(-10, 10, 0, 0, -10, 10);
  at(J::LShoulder) = deg(-10, 10, 0, 0, -10, 10);
  c.subject_scale_spread = 0.1;
  return c;
}

Vec3 rest_direction(int joint) {
  switch (static_cast<Joint>(joint)) {
    case Joint::RHip:
    case Joint::RShoulder:
      return -Vec3::UnitX();
    case Joint::LHip:
    case Joint::LShoulder:
      return Vec3::UnitX();
    case Joint::Thorax:
    case Joint::UpperNeck:
    case Joint::HeadTop:
      return Vec3::UnitY();
    case Joint::Pelvis:
      return Vec3::Zero();
    default:
      return -Vec3::UnitY();  // limbs hang down
  }
}

std::array<double, kNumJoints> subject_bone_lengths(const SyntheticMotionConfig& cfg, int subject) {
  auto lengths = cfg.bone_lengths;
  if (cfg.subject_scale_spread > 0.0) {
    auto rng = sample_rng(cfg.seed, static_cast<std::uint64_t>(subject), 7);
    std::uniform_real_distribution<double> u(1.0 - cfg.subject_scale_spread,
                                             1.0 + cfg.subject_scale_spread);
    const double scale = u(rng);
    for (double& l : lengths) l *= scale;
  }
  return lengths;
}

Pose3D forward_kinematics(const std::array<Vec3, kNumJoints>& euler,
                          const std::array<double, kNumJoints>& lengths, const Vec3& root_position) {
  const auto topo = SkeletonTopology::canonical(lengths);
  const auto order = topo.traversal_order();
  std::array<Mat3, kNumJoints> frame{};
  Pose3D pose;
  frame[kRootJoint] = euler_xyz(euler[kRootJoint]);
  pose[kRootJoint] = root_position;
  for (int k = 1; k < kNumJoints; ++k) {
    const int c = order[static_cast<std::size_t>(k)];
    const int p = topo.parent[static_cast<std::size_t>(c)];
    const auto ci = static_cast<std::size_t>(c);
    frame[ci] = frame[static_cast<std::size_t>(p)] * euler_xyz(euler[ci]);
    pose[c] = pose[p] + frame[ci] * (rest_direction(c) * lengths[ci]);
  }
  return pose;
}

std::vector<WorldPose> generate_motion(const SyntheticMotionConfig& cfg) {
  cfg.validate();
  std::vector<std::array<double, kNumJoints>> lengths;
  for (int s = 0; s < cfg.num_subjects; ++s) lengths.push_back(subject_bone_lengths(cfg, s));

  std::vector<WorldPose> out(static_cast<std::size_t>(cfg.num_poses));
  for (int i = 0; i < cfg.num_poses; ++i) {
    auto rng = sample_rng(cfg.seed, static_cast<std::uint64_t>(i), 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::array<Vec3, kNumJoints> euler{};
    for (int j = 0; j < kNumJoints; ++j)
      for (int a = 0; a < 3; ++a) {
        const auto& r = cfg.angles[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)];
        euler[static_cast<std::size_t>(j)](a) = r.lo + (r.hi - r.lo) * u(rng);
      }
    const int subject = i % cfg.num_subjects;
    auto& wp = out[static_cast<std::size_t>(i)];
    wp.pose = forward_kinematics(euler, lengths[static_cast<std::size_t>(subject)], cfg.root_position);
    wp.pose_id = i;
    wp.subject = subject;
  }
  return out;
}

}  // namespace drpose
