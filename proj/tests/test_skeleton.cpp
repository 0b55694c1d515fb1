#include <doctest.h>

#include <numeric>
#include <random>

#include "drpose/errors.hpp"
#include "drpose/skeleton.hpp"
#include "support.hpp"

using namespace drpose;

namespace {

Pose3D pose_with_depths(const std::array<double, kNumJoints>& z) {
  Pose3D p;
  for (int j = 0; j < kNumJoints; ++j) p[j] = Vec3(j, -j, z[static_cast<std::size_t>(j)]);
  return p;
}

}  // namespace

TEST_CASE("ranking matrix follows the depth tolerance") {
  std::array<double, kNumJoints> z{};
  z[0] = 100.0;
  z[1] = 0.0;
  z[2] = 5.0;
  const auto m = ranking_matrix_from_pose(pose_with_depths(z), 10.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(2, 1) == 0.5);
  CHECK(m(1, 2) == 0.5);
  for (int i = 0; i < kNumJoints; ++i) CHECK(m(i, i) == 0.5);
}

TEST_CASE("ranking matrix rejects bad input") {
  Pose3D p;
  CHECK_THROWS_AS(ranking_matrix_from_pose(p, -1.0), InputError);
  p[3].z() = std::nan("");
  CHECK_THROWS_AS(ranking_matrix_from_pose(p, 0.0), InputError);
}

TEST_CASE("ranking matrix invariants hold for random poses") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> eps_dist(0.0, 300.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pose = testing::random_pose(rng);
    const double eps = trial % 4 == 0 ? 0.0 : eps_dist(rng);
    const auto m = ranking_matrix_from_pose(pose, eps);
    for (int i = 0; i < kNumJoints; ++i) {
      REQUIRE(m(i, i) == 0.5);
      for (int j = 0; j < kNumJoints; ++j) REQUIRE(m(i, j) + m(j, i) == 1.0);
    }
    // Root centering does not change depth relations.
    CHECK(ranking_matrix_from_pose(root_center(pose), eps) == m);
  }
}

TEST_CASE("strict relation agrees with depth order for distinct depths") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pose = testing::random_pose(rng);
    const auto m = ranking_matrix_from_pose(pose, 0.0);
    const auto order = depth_order(pose);
    for (int i = 0; i < kNumJoints; ++i)
      for (int j = 0; j < kNumJoints; ++j)
        if (i != j)
          REQUIRE((m(i, j) == 1.0) == (order.ranks[static_cast<std::size_t>(i)] >
                                       order.ranks[static_cast<std::size_t>(j)]));
  }
}

TEST_CASE("depth ranks on toy inputs") {
  const std::vector<double> toy = {30, 10, 20};
  CHECK(depth_ranks(toy) == std::vector<int>{3, 1, 2});

  std::array<double, kNumJoints> flat{};
  flat.fill(7.0);
  const auto tied = depth_order(pose_with_depths(flat));
  std::array<double, kNumJoints> inc{};
  std::iota(inc.begin(), inc.end(), -3.0);
  const auto increasing = depth_order(pose_with_depths(inc));
  for (int j = 0; j < kNumJoints; ++j) {
    CHECK(tied.ranks[static_cast<std::size_t>(j)] == j + 1);
    CHECK(increasing.ranks[static_cast<std::size_t>(j)] == j + 1);
  }
}

TEST_CASE("depth order is invariant to translation and positive scaling") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pose = testing::random_pose(rng);
    const auto base = depth_order(pose);
    const double s = u(rng);
    const double t = 1000.0 * (u(rng) - 5.0);
    Pose3D moved = pose;
    for (auto& j : moved.joints) j.z() = s * j.z() + t;
    CHECK(depth_order(moved).ranks == base.ranks);
  }
}

TEST_CASE("depth order normalized form has zero mean and unit std") {
  std::array<double, kNumJoints> inc{};
  std::iota(inc.begin(), inc.end(), 0.0);
  const auto o = depth_order(pose_with_depths(inc));
  double mean = 0.0, var = 0.0;
  for (double v : o.normalized) mean += v;
  mean /= kNumJoints;
  for (double v : o.normalized) var += (v - mean) * (v - mean);
  CHECK(std::abs(mean) < 1e-12);
  CHECK(std::abs(std::sqrt(var / kNumJoints) - 1.0) < 1e-12);
  std::array<int, kNumJoints> bad{};
  bad.fill(1);
  CHECK_THROWS_AS(DepthOrder::from_ranks(bad), InputError);
}

TEST_CASE("normalize") {
  const std::vector<double> v = {1, 2, 3};
  const auto n = normalize(v);
  CHECK(n[0] == doctest::Approx(-1.2247449).epsilon(1e-7));
  CHECK(std::abs(n[1]) < 1e-15);
  CHECK(n[2] == doctest::Approx(1.2247449).epsilon(1e-7));

  const auto again = normalize(n);
  for (std::size_t i = 0; i < n.size(); ++i) CHECK(std::abs(again[i] - n[i]) < 1e-12);

  const std::vector<double> constant = {5, 5, 5};
  CHECK_THROWS_AS(normalize(constant), DegenerateError);
  const std::vector<double> single = {5};
  CHECK_THROWS_AS(normalize(single), InputError);
}

TEST_CASE("normalize property on random vectors") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(3.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial % 40);
    for (double& x : v) x = g(rng);
    const auto n = normalize(v);
    double mean = 0.0, var = 0.0;
    for (double x : n) mean += x;
    mean /= static_cast<double>(n.size());
    for (double x : n) var += (x - mean) * (x - mean);
    REQUIRE(std::abs(mean) < 1e-12);
    REQUIRE(std::abs(std::sqrt(var / static_cast<double>(n.size())) - 1.0) < 1e-12);
  }
}

TEST_CASE("root centering") {
  std::mt19937_64 rng(15);
  auto pose = testing::random_pose(rng);
  pose[kRootJoint] = Vec3(10, 20, 30);
  const auto c = root_center(pose);
  CHECK(c[kRootJoint].norm() == 0.0);
  for (int j = 0; j < kNumJoints; ++j) CHECK((c[j] - (pose[j] - Vec3(10, 20, 30))).norm() < 1e-12);
  const auto cc = root_center(c);
  for (int j = 0; j < kNumJoints; ++j) CHECK(cc[j] == c[j]);

  Pose2D p2;
  for (int j = 0; j < kNumJoints; ++j) p2[j] = Vec2(j, 2 * j);
  const auto c2 = root_center(p2);
  CHECK(c2[kRootJoint].norm() == 0.0);
  CHECK(c2[0] == Vec2(-kRootJoint, -2 * kRootJoint));
}

TEST_CASE("flatten ranking layout and round trip") {
  RankingMatrix ties;
  for (double v : flatten_ranking(ties)) CHECK(v == 0.5);

  std::mt19937_64 rng(16);
  const auto m = ranking_matrix_from_pose(testing::random_pose(rng), 50.0);
  const auto flat = flatten_ranking(m);
  for (int i = 0; i < kNumJoints; ++i)
    for (int j = 0; j < kNumJoints; ++j) CHECK(flat[static_cast<std::size_t>(16 * i + j)] == m(i, j));
  CHECK(unflatten_ranking(flat) == m);

  auto broken = flat;
  broken[RankingMatrix::index(0, 1)] = 0.25;
  CHECK_THROWS_AS(unflatten_ranking(broken), InputError);
}

TEST_CASE("canonical topology is a valid tree") {
  const auto topo = SkeletonTopology::canonical();
  CHECK_NOTHROW(topo.validate());
  CHECK(topo.parent[kRootJoint] == -1);
  const auto order = topo.traversal_order();
  CHECK(order[0] == kRootJoint);
  std::array<int, kNumJoints> pos{};
  for (int k = 0; k < kNumJoints; ++k) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
  for (int j = 0; j < kNumJoints; ++j)
    if (j != kRootJoint) CHECK(pos[static_cast<std::size_t>(topo.parent[static_cast<std::size_t>(j)])] < pos[static_cast<std::size_t>(j)]);

  auto cyclic = topo;
  cyclic.parent[7] = 8;  // thorax <- upper neck <- thorax
  CHECK_THROWS_AS(cyclic.validate(), InputError);
  auto zero = topo;
  zero.bone_length[0] = 0.0;
  CHECK_THROWS_AS(zero.validate(), InputError);
}
