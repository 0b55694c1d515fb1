#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "drpose/motion.hpp"
#include "drpose/skeleton.hpp"

namespace drpose::testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("drpose_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Random pose of the canonical topology with joint angles drawn uniformly,
// so bone lengths hold exactly.
inline Pose3D random_consistent_pose(std::mt19937_64& rng, const Vec3& root = Vec3(0, 0, 3000)) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::array<Vec3, kNumJoints> euler{};
  for (auto& e : euler) e = Vec3(u(rng), u(rng), u(rng));
  return forward_kinematics(euler, default_bone_lengths(), root);
}

struct ExactPose {
  Pose3D pose;
  SkeletonTopology topo;
};

// Pose whose coordinates and bone lengths are all integers, built from
// Pythagorean quadruples a^2 + b^2 + c^2 = d^2, so bone-length consistency
// holds exactly in floating point.
inline ExactPose random_exact_pose(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-9, 9);
  std::uniform_int_distribution<int> shift(-2000, 2000);
  ExactPose e;
  e.topo = SkeletonTopology::canonical();
  e.pose[kRootJoint] = Vec3(shift(rng), shift(rng), 3000 + shift(rng));
  const auto order = e.topo.traversal_order();
  for (int k = 1; k < kNumJoints; ++k) {
    const int c = order[static_cast<std::size_t>(k)];
    int m = 0, n = 0, p = 0, q = 0, d = 0;
    while (d == 0) {
      m = u(rng);
      n = u(rng);
      p = u(rng);
      q = u(rng);
      d = m * m + n * n + p * p + q * q;
    }
    Vec3 step(m * m + n * n - p * p - q * q, 2 * (m * q + n * p), 2 * (n * q - m * p));
    // Random axis permutation so depth is not always the same component.
    std::shuffle(step.data(), step.data() + 3, rng);
    e.topo.bone_length[static_cast<std::size_t>(c)] = 3.0 * d;
    e.pose[c] = e.pose[e.topo.parent[static_cast<std::size_t>(c)]] + 3.0 * step;
  }
  return e;
}

inline Pose3D random_pose(std::mt19937_64& rng, double scale = 500.0) {
  std::normal_distribution<double> n(0.0, scale);
  Pose3D p;
  for (auto& j : p.joints) j = Vec3(n(rng), n(rng), n(rng));
  return p;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace drpose::testing
