#include "drpose/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "drpose/errors.hpp"

namespace drpose {

namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "r_ankle",   "r_knee",      "r_hip",   "l_hip",    "l_knee",  "l_ankle",
    "pelvis",    "thorax",      "upper_neck", "head_top", "r_wrist", "r_elbow",
    "r_shoulder", "l_shoulder", "l_elbow", "l_wrist"};

constexpr std::array<int, kNumJoints> kCanonicalParents = {
    1,   // r_ankle -> r_knee
    2,   // r_knee -> r_hip
    6,   // r_hip -> pelvis
    6,   // l_hip -> pelvis
    3,   // l_knee -> l_hip
    4,   // l_ankle -> l_knee
    -1,  // pelvis
    6,   // thorax -> pelvis
    7,   // upper_neck -> thorax
    8,   // head_top -> upper_neck
    11,  // r_wrist -> r_elbow
    12,  // r_elbow -> r_shoulder
    7,   // r_shoulder -> thorax
    7,   // l_shoulder -> thorax
    13,  // l_elbow -> l_shoulder
    14,  // l_wrist -> l_elbow
};

bool is_ranking_value(double v) { return v == 0.0 || v == 0.5 || v == 1.0; }

}  // namespace

std::string_view joint_name(int joint) {
  if (joint < 0 || joint >= kNumJoints) throw InputError("joint index out of range");
  return kJointNames[static_cast<std::size_t>(joint)];
}

std::array<double, 3 * kNumJoints> Pose3D::flat() const {
  std::array<double, 3 * kNumJoints> out{};
  for (int j = 0; j < kNumJoints; ++j)
    for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(3 * j + c)] = (*this)[j](c);
  return out;
}

Pose3D Pose3D::from_flat(std::span<const double> values) {
  if (values.size() != 3 * kNumJoints)
    throw StructuralError("Pose3D expects 48 values, got " + std::to_string(values.size()));
  Pose3D p;
  for (int j = 0; j < kNumJoints; ++j)
    p[j] = Vec3(values[3 * j], values[3 * j + 1], values[3 * j + 2]);
  return p;
}

bool Pose3D::finite() const {
  return std::all_of(joints.begin(), joints.end(), [](const Vec3& v) { return v.allFinite(); });
}

std::array<double, 2 * kNumJoints> Pose2D::flat() const {
  std::array<double, 2 * kNumJoints> out{};
  for (int j = 0; j < kNumJoints; ++j) {
    out[static_cast<std::size_t>(2 * j)] = (*this)[j].x();
    out[static_cast<std::size_t>(2 * j + 1)] = (*this)[j].y();
  }
  return out;
}

Pose2D Pose2D::from_flat(std::span<const double> values) {
  if (values.size() != 2 * kNumJoints)
    throw StructuralError("Pose2D expects 32 values, got " + std::to_string(values.size()));
  Pose2D p;
  for (int j = 0; j < kNumJoints; ++j) p[j] = Vec2(values[2 * j], values[2 * j + 1]);
  return p;
}

bool Pose2D::finite() const {
  return std::all_of(joints.begin(), joints.end(), [](const Vec2& v) { return v.allFinite(); });
}

void SkeletonTopology::validate() const {
  if (parent[kRootJoint] != -1) throw InputError("topology: root joint must have no parent");
  for (int j = 0; j < kNumJoints; ++j) {
    if (j == kRootJoint) continue;
    const int p = parent[static_cast<std::size_t>(j)];
    if (p < 0 || p >= kNumJoints || p == j)
      throw InputError("topology: joint " + std::string(joint_name(j)) + " has invalid parent");
    const double len = bone_length[static_cast<std::size_t>(j)];
    if (!(len > 0.0) || !std::isfinite(len))
      throw InputError("topology: bone ending at " + std::string(joint_name(j)) +
                       " must have positive length");
  }
  // Every joint must reach the root within kNumJoints steps; otherwise there is a cycle.
  for (int j = 0; j < kNumJoints; ++j) {
    int cur = j;
    int steps = 0;
    while (cur != kRootJoint) {
      cur = parent[static_cast<std::size_t>(cur)];
      if (++steps > kNumJoints) throw InputError("topology: parent graph has a cycle");
    }
  }
}

std::array<int, kNumJoints> SkeletonTopology::traversal_order() const {
  validate();
  std::array<int, kNumJoints> order{};
  std::size_t head = 0;
  std::size_t tail = 0;
  order[tail++] = kRootJoint;
  while (head < tail) {
    const int cur = order[head++];
    for (int j = 0; j < kNumJoints; ++j)
      if (parent[static_cast<std::size_t>(j)] == cur) order[tail++] = j;
  }
  return order;
}

std::array<double, kNumJoints> default_bone_lengths() {
  return {440.0, 450.0, 130.0, 130.0, 450.0, 440.0, 0.0,   480.0,
          110.0, 200.0, 250.0, 280.0, 160.0, 160.0, 280.0, 250.0};
}

SkeletonTopology SkeletonTopology::canonical() { return canonical(default_bone_lengths()); }

SkeletonTopology SkeletonTopology::canonical(const std::array<double, kNumJoints>& lengths) {
  SkeletonTopology t;
  t.parent = kCanonicalParents;
  t.bone_length = lengths;
  t.bone_length[kRootJoint] = 0.0;
  t.validate();
  return t;
}

RankingMatrix::RankingMatrix() { entries_.fill(0.5); }

RankingMatrix RankingMatrix::from_entries(std::span<const double> row_major) {
  if (row_major.size() != static_cast<std::size_t>(kNumPairs))
    throw InputError("ranking matrix expects 256 entries, got " +
                     std::to_string(row_major.size()));
  RankingMatrix m;
  std::copy(row_major.begin(), row_major.end(), m.entries_.begin());
  for (int i = 0; i < kNumJoints; ++i) {
    if (m(i, i) != 0.5) throw InputError("ranking matrix diagonal must be 0.5");
    for (int j = 0; j < kNumJoints; ++j) {
      if (!is_ranking_value(m(i, j)))
        throw InputError("ranking matrix entries must be 0, 0.5 or 1");
      if (m(i, j) + m(j, i) != 1.0)
        throw InputError("ranking matrix violates m(i,j) + m(j,i) = 1 at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  return m;
}

void RankingMatrix::set_pair(int i, int j, double value) {
  if (!is_ranking_value(value)) throw InputError("ranking value must be 0, 0.5 or 1");
  if (i == j && value != 0.5) throw InputError("diagonal ranking entry must be 0.5");
  entries_[index(i, j)] = value;
  entries_[index(j, i)] = 1.0 - value;
}

DepthOrder DepthOrder::from_ranks(const std::array<int, kNumJoints>& ranks) {
  std::array<bool, kNumJoints> seen{};
  for (int r : ranks) {
    if (r < 1 || r > kNumJoints || seen[static_cast<std::size_t>(r - 1)])
      throw InputError("depth order must be a permutation of 1..16");
    seen[static_cast<std::size_t>(r - 1)] = true;
  }
  DepthOrder o;
  o.ranks = ranks;
  std::array<double, kNumJoints> as_real{};
  std::copy(ranks.begin(), ranks.end(), as_real.begin());
  const auto norm = normalize(as_real);
  std::copy(norm.begin(), norm.end(), o.normalized.begin());
  return o;
}

RankingMatrix ranking_matrix_from_pose(const Pose3D& pose, double eps) {
  if (!(eps >= 0.0)) throw InputError("ranking tolerance must be non-negative");
  RankingMatrix m;
  for (int i = 0; i < kNumJoints; ++i) {
    const double zi = pose[i].z();
    if (!std::isfinite(zi)) throw InputError("ranking_matrix_from_pose: non-finite depth");
  }
  for (int i = 0; i < kNumJoints; ++i) {
    for (int j = i + 1; j < kNumJoints; ++j) {
      const double zi = pose[i].z();
      const double zj = pose[j].z();
      double v = 0.5;
      if (zi > zj + eps)
        v = 1.0;
      else if (zi < zj - eps)
        v = 0.0;
      m.set_pair(i, j, v);
    }
  }
  return m;
}

std::vector<int> depth_ranks(std::span<const double> depths) {
  std::vector<int> idx(depths.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return depths[static_cast<std::size_t>(a)] <
                                              depths[static_cast<std::size_t>(b)]; });
  std::vector<int> ranks(depths.size());
  for (std::size_t pos = 0; pos < idx.size(); ++pos)
    ranks[static_cast<std::size_t>(idx[pos])] = static_cast<int>(pos) + 1;
  return ranks;
}

DepthOrder depth_order(const Pose3D& pose) {
  std::array<double, kNumJoints> z{};
  for (int j = 0; j < kNumJoints; ++j) z[static_cast<std::size_t>(j)] = pose[j].z();
  const auto r = depth_ranks(z);
  std::array<int, kNumJoints> ranks{};
  std::copy(r.begin(), r.end(), ranks.begin());
  return DepthOrder::from_ranks(ranks);
}

std::vector<double> normalize(std::span<const double> values) {
  if (values.size() < 2) throw InputError("normalize needs at least two values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> out(values.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i] - mean;
    ss += out[i] * out[i];
  }
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0) || !std::isfinite(sd)) throw DegenerateError("normalize: zero-variance input");
  for (double& v : out) v /= sd;
  return out;
}

Pose3D root_center(const Pose3D& pose) {
  Pose3D out;
  const Vec3 root = pose[kRootJoint];
  for (int j = 0; j < kNumJoints; ++j) out[j] = pose[j] - root;
  return out;
}

Pose2D root_center(const Pose2D& pose) {
  Pose2D out;
  const Vec2 root = pose[kRootJoint];
  for (int j = 0; j < kNumJoints; ++j) out[j] = pose[j] - root;
  return out;
}

std::array<double, kNumPairs> flatten_ranking(const RankingMatrix& m) { return m.entries(); }

RankingMatrix unflatten_ranking(std::span<const double> flat) {
  return RankingMatrix::from_entries(flat);
}

}  // namespace drpose
