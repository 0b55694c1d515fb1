#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace drpose {

inline constexpr int kNumJoints = 16;
inline constexpr int kNumPairs = kNumJoints * kNumJoints;

// 16-joint MPII-style layout. Pelvis is the root of the kinematic tree.
enum class Joint : int {
  RAnkle = 0,
  RKnee = 1,
  RHip = 2,
  LHip = 3,
  LKnee = 4,
  LAnkle = 5,
  Pelvis = 6,
  Thorax = 7,
  UpperNeck = 8,
  HeadTop = 9,
  RWrist = 10,
  RElbow = 11,
  RShoulder = 12,
  LShoulder = 13,
  LElbow = 14,
  LWrist = 15,
};

inline constexpr int kRootJoint = static_cast<int>(Joint::Pelvis);

std::string_view joint_name(int joint);

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace detail {
// Eigen vectors are not zero-initialized by default construction.
template <typename V>
inline std::array<V, kNumJoints> zero_joints() {
  std::array<V, kNumJoints> a;
  for (auto& v : a) v.setZero();
  return a;
}
}  // namespace detail

struct Pose3D {
  std::array<Vec3, kNumJoints> joints = detail::zero_joints<Vec3>();

  Vec3& operator[](int j) { return joints[static_cast<std::size_t>(j)]; }
  const Vec3& operator[](int j) const { return joints[static_cast<std::size_t>(j)]; }

  // Joint-major x,y,z layout: 48 values.
  std::array<double, 3 * kNumJoints> flat() const;
  static Pose3D from_flat(std::span<const double> values);
  bool finite() const;
};

struct Pose2D {
  std::array<Vec2, kNumJoints> joints = detail::zero_joints<Vec2>();

  Vec2& operator[](int j) { return joints[static_cast<std::size_t>(j)]; }
  const Vec2& operator[](int j) const { return joints[static_cast<std::size_t>(j)]; }

  std::array<double, 2 * kNumJoints> flat() const;
  static Pose2D from_flat(std::span<const double> values);
  bool finite() const;
};

// Kinematic tree over the 16 joints. parent[root] == -1; bone_length[j] is
// the distance between j and parent[j] and is ignored at the root.
struct SkeletonTopology {
  std::array<int, kNumJoints> parent{};
  std::array<double, kNumJoints> bone_length{};

  // Throws InputError unless the parent graph is a tree rooted at the
  // canonical root with strictly positive bone lengths.
  void validate() const;

  // Root first; every joint appears after its parent.
  std::array<int, kNumJoints> traversal_order() const;

  static SkeletonTopology canonical();
  static SkeletonTopology canonical(const std::array<double, kNumJoints>& lengths);
};

// Default anthropometric bone lengths (mm), indexed by child joint.
std::array<double, kNumJoints> default_bone_lengths();

// Pairwise depth relation. entries(i, j) is 1 when joint i lies deeper
// (larger z) than joint j, 0 when shallower and 0.5 for a tie.
class RankingMatrix {
 public:
  // All ties.
  RankingMatrix();

  // Throws InputError if any entry is outside {0, 0.5, 1}, the diagonal is
  // not 0.5, or some pair violates m(i,j) + m(j,i) == 1.
  static RankingMatrix from_entries(std::span<const double> row_major);

  double operator()(int i, int j) const { return entries_[index(i, j)]; }

  // Sets (i, j) and the complementary (j, i) entry together.
  void set_pair(int i, int j, double value);

  const std::array<double, kNumPairs>& entries() const { return entries_; }

  bool operator==(const RankingMatrix&) const = default;

  static constexpr std::size_t index(int i, int j) {
    return static_cast<std::size_t>(kNumJoints * i + j);
  }

 private:
  std::array<double, kNumPairs> entries_{};
};

struct DepthOrder {
  // 1-based rank of each joint, sorted by increasing depth.
  std::array<int, kNumJoints> ranks{};
  // The ranks normalized to zero mean and unit population std.
  std::array<double, kNumJoints> normalized{};

  static DepthOrder from_ranks(const std::array<int, kNumJoints>& ranks);
};

RankingMatrix ranking_matrix_from_pose(const Pose3D& pose, double eps = 0.0);

// Ties are broken by ascending joint index.
DepthOrder depth_order(const Pose3D& pose);

// Generic form of depth_order for any number of depths; used for toy cases.
std::vector<int> depth_ranks(std::span<const double> depths);

// Zero mean, unit population standard deviation. Throws DegenerateError for
// constant input and InputError for fewer than two values.
std::vector<double> normalize(std::span<const double> values);

Pose3D root_center(const Pose3D& pose);
Pose2D root_center(const Pose2D& pose);

std::array<double, kNumPairs> flatten_ranking(const RankingMatrix& m);
RankingMatrix unflatten_ranking(std::span<const double> flat);

}  // namespace drpose
