#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "drpose/augment.hpp"
#include "drpose/camera.hpp"
#include "drpose/errors.hpp"
#include "drpose/geometry.hpp"
#include "drpose/motion.hpp"
#include "support.hpp"

using namespace drpose;

namespace {

std::vector<Camera> ring_rig(int n, double radius, const Vec3& target) {
  std::vector<Camera> rig;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n + 0.3;
    rig.push_back(Camera::look_at(target + Vec3(radius * std::sin(a), 400.0 + 100.0 * k, radius * std::cos(a)),
                                  target, 1000.0));
  }
  return rig;
}

std::vector<WorldPose> some_poses(int n, std::uint64_t seed) {
  auto cfg = SyntheticMotionConfig::anthropometric();
  cfg.num_poses = n;
  cfg.num_subjects = 2;
  cfg.seed = seed;
  return generate_motion(cfg);
}

bool same_samples(const Dataset& a, const Dataset& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].pose2d.flat() != b[i].pose2d.flat()) return false;
    if (a[i].pose3d.flat() != b[i].pose3d.flat()) return false;
    if (!(a[i].ranking == b[i].ranking)) return false;
    if (a[i].pose_id != b[i].pose_id || a[i].camera != b[i].camera || a[i].augmented != b[i].augmented)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("look-at cameras are upright rotations") {
  const auto cam = Camera::look_at(Vec3(3000, 1500, -2000), Vec3(0, 1000, 0), 900.0);
  CHECK(cam.valid(1e-12));
  CHECK(distance_to_axis(Vec3(0, 1000, 0), OpticalAxis::of(cam)) < 1e-9);
  CHECK(cam.to_camera(Vec3(0, 1000, 0)).head<2>().norm() < 1e-9);
  CHECK_THROWS_AS(Camera::look_at(Vec3(0, 5000, 0), Vec3(0, 0, 0), 1.0), DegenerateError);

  Camera identity;
  CHECK(identity.valid());
  CHECK(Camera::look_at(Vec3::Zero(), Vec3(0, 0, 10), 1.0).rotation.isApprox(Mat3::Identity(), 1e-15));
}

TEST_CASE("optical center of intersecting axes") {
  const std::vector<OpticalAxis> xy = {OpticalAxis::make(Vec3(5, 0, 0), Vec3(1, 0, 0)),
                                       OpticalAxis::make(Vec3(0, -2, 0), Vec3(0, 3, 0))};
  CHECK(optical_center(xy).norm() < 1e-12);

  std::mt19937_64 rng(41);
  const Vec3 p(1, 2, 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<OpticalAxis> axes;
    for (int k = 0; k < 4; ++k) {
      const Vec3 d = sample_unit_sphere(rng);
      std::normal_distribution<double> n(0.0, 1000.0);
      axes.push_back(OpticalAxis::make(p + n(rng) * d, d));
    }
    REQUIRE((optical_center(axes) - p).norm() <= 1e-9 * p.norm());
  }

  const std::vector<OpticalAxis> parallel = {OpticalAxis::make(Vec3(0, 0, 0), Vec3(0, 0, 1)),
                                             OpticalAxis::make(Vec3(1, 0, 0), Vec3(0, 0, -2))};
  CHECK_THROWS_AS(optical_center(parallel), DegenerateError);
  CHECK_THROWS_AS(optical_center(std::span<const OpticalAxis>(parallel).first(1)), InputError);
  CHECK_THROWS_AS(OpticalAxis::make(Vec3::Zero(), Vec3::Zero()), InputError);
}

TEST_CASE("distance distribution") {
  Camera a;
  a.position = Vec3(5000, 0, 0);
  const std::vector<Camera> one = {a};
  const auto s1 = fit_distance_distribution(one, Vec3::Zero());
  CHECK(s1.mean == 5000.0);
  CHECK(s1.std == 0.0);

  Camera b = a, c = a;
  b.position = Vec3(0, 4000, 0);
  c.position = Vec3(0, 0, -6000);
  const std::vector<Camera> two = {b, c};
  const auto s2 = fit_distance_distribution(two, Vec3::Zero());
  CHECK(s2.mean == doctest::Approx(5000.0));
  CHECK(s2.std == doctest::Approx(1000.0));

  std::vector<Camera> moved = two;
  for (auto& m : moved) m.position += Vec3(123, -45, 6);
  const auto s3 = fit_distance_distribution(moved, Vec3(123, -45, 6));
  CHECK(s3.mean == doctest::Approx(s2.mean).epsilon(1e-12));
  CHECK(s3.std == doctest::Approx(s2.std).epsilon(1e-12));

  CHECK_THROWS_AS(fit_distance_distribution(std::vector<Camera>{}, Vec3::Zero()), InputError);
}

TEST_CASE("sampled cameras") {
  std::mt19937_64 rng(42);
  const Vec3 center(10, 1000, -20);
  for (int t = 0; t < 1000; ++t) {
    const auto cam = sample_camera(center, 5000.0, t % 2 ? 0.0 : 800.0, 1000.0, rng);
    REQUIRE(cam.valid(1e-9));
    REQUIRE(((cam.rotation.transpose() * cam.rotation) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(std::abs(cam.rotation.determinant() - 1.0) < 1e-9);
    REQUIRE(distance_to_axis(center, OpticalAxis::of(cam)) < 1e-9);
    REQUIRE((cam.position - center).norm() > 500.0);
    if (t % 2) REQUIRE(std::abs((cam.position - center).norm() - 5000.0) < 1e-9);
    REQUIRE(std::abs(cam.forward().dot(kWorldUp)) <= 0.999);
  }
}

TEST_CASE("sphere directions fill every octant evenly") {
  std::mt19937_64 rng(43);
  std::array<int, 8> counts{};
  for (int t = 0; t < 10000; ++t) {
    const auto cam = sample_camera(Vec3::Zero(), 1.0, 0.0, 1.0, rng);
    const Vec3 d = cam.position.normalized();
    counts[static_cast<std::size_t>((d.x() > 0) + 2 * (d.y() > 0) + 4 * (d.z() > 0))]++;
  }
  for (int c : counts) {
    CHECK(c >= 1100);
    CHECK(c <= 1400);
  }
}

TEST_CASE("gmm noise") {
  std::mt19937_64 rng(44);
  Pose2D p;
  for (int j = 0; j < kNumJoints; ++j) p[j] = Vec2(j, -j);

  const std::vector<GmmComponent> zero = {GmmComponent{}};
  const auto same = gmm_noise_2d(p, zero, rng);
  for (int j = 0; j < kNumJoints; ++j) CHECK(same[j] == p[j]);

  const double sigma = 3.0;
  GmmComponent g;
  g.cov = Eigen::Matrix2d::Identity() * sigma * sigma;
  const std::vector<GmmComponent> iso = {g};
  double sx = 0, sy = 0, sxx = 0, syy = 0;
  long n = 0;
  Pose2D origin;
  while (n < 100000) {
    const auto q = gmm_noise_2d(origin, iso, rng);
    for (const auto& v : q.joints) {
      sx += v.x();
      sy += v.y();
      sxx += v.x() * v.x();
      syy += v.y() * v.y();
      ++n;
    }
  }
  const double dn = static_cast<double>(n);
  CHECK(std::sqrt(sxx / dn - (sx / dn) * (sx / dn)) == doctest::Approx(sigma).epsilon(0.02));
  CHECK(std::sqrt(syy / dn - (sy / dn) * (sy / dn)) == doctest::Approx(sigma).epsilon(0.02));

  GmmComponent shifted;
  shifted.weight = 1.0;
  shifted.mean = Vec2(100, 0);
  GmmComponent never;
  never.weight = 0.0;
  never.mean = Vec2(-1e6, 0);
  const std::vector<GmmComponent> pair = {shifted, never};
  for (int t = 0; t < 100; ++t)
    for (const auto& v : gmm_noise_2d(origin, pair, rng).joints) REQUIRE(v == Vec2(100, 0));

  GmmComponent bad;
  bad.cov << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(gmm_noise_2d(p, std::vector<GmmComponent>{bad}, rng), ConfigError);
  GmmComponent asym;
  asym.cov << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(gmm_noise_2d(p, std::vector<GmmComponent>{asym}, rng), ConfigError);
  GmmComponent light;
  light.weight = 0.4;
  CHECK_THROWS_AS(gmm_noise_2d(p, std::vector<GmmComponent>{light}, rng), ConfigError);
}

TEST_CASE("synthesize sample") {
  std::mt19937_64 rng(45);
  const auto world = testing::random_consistent_pose(rng, Vec3(0, 0, 5000));
  const auto s = synthesize_sample(world, Camera{}, 0.0);
  for (int j = 0; j < kNumJoints; ++j) CHECK((s.pose3d[j] - world[j]).norm() < 1e-12);
  CHECK(s.ranking == ranking_matrix_from_pose(s.pose3d, 0.0));

  Pose3D behind;
  for (auto& j : behind.joints) j = Vec3(0, 0, -1);
  CHECK_THROWS_AS(synthesize_sample(behind, Camera{}, 0.0), ProjectionError);
}

TEST_CASE("opposite cameras flip strict relations exactly when viewing horizontally") {
  // With eye height equal to target height the 180 degree rotation negates
  // camera-frame depth up to the distance offset, so ranking pairs flip.
  std::mt19937_64 rng(46);
  const Vec3 target(0, 1000, 0);
  const auto front = Camera::look_at(Vec3(4000, 1000, 0), target, 1.0);
  const auto back = Camera::look_at(Vec3(-4000, 1000, 0), target, 1.0);
  for (int t = 0; t < 50; ++t) {
    const auto pose = testing::random_consistent_pose(rng, target);
    const auto a = synthesize_sample(pose, front).ranking;
    const auto b = synthesize_sample(pose, back).ranking;
    for (int i = 0; i < kNumJoints; ++i)
      for (int j = 0; j < kNumJoints; ++j)
        if (i != j) REQUIRE(a(i, j) == 1.0 - b(i, j));
  }
}

TEST_CASE("augmentation size, determinism and serial equivalence") {
  const auto poses = some_poses(100, 3);
  const auto rig = ring_rig(3, 5000.0, Vec3(0, 1000, 0));
  NoiseConfig noise;
  noise.gmm = NoiseConfig::default_gmm();
  noise.acc = AccuracyMatrix::uniform(0.9);
  AugmentConfig cfg;
  cfg.seed = 99;
  const auto a = augment_dataset(poses, rig, noise, cfg);
  CHECK(a.size() == 300);
  CHECK(same_samples(a, augment_dataset(poses, rig, noise, cfg)));
  CHECK(same_samples(a, augment_dataset_serial(poses, rig, noise, cfg)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].augmented);
    REQUIRE(a[i].camera == -1);
    REQUIRE(a[i].pose_id == poses[i / 3].pose_id);
  }
  cfg.seed = 100;
  CHECK_FALSE(same_samples(a, augment_dataset(poses, rig, noise, cfg)));
  cfg.factor = 0;
  CHECK_THROWS_AS(augment_dataset(poses, rig, noise, cfg), ConfigError);
}

TEST_CASE("noise-free augmentation through fixed cameras equals direct synthesis") {
  const auto poses = some_poses(20, 4);
  const auto rig = ring_rig(1, 4500.0, Vec3(0, 1000, 0));
  AugmentConfig cfg;
  cfg.factor = 1;
  cfg.fixed_cameras = true;
  const auto out = augment_dataset(poses, rig, NoiseConfig::none(), cfg);
  REQUIRE(out.size() == poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto direct = synthesize_sample(poses[i].pose, rig[0]);
    CHECK(out[i].pose2d.flat() == direct.pose2d.flat());
    CHECK(out[i].pose3d.flat() == direct.pose3d.flat());
    CHECK(out[i].ranking == direct.ranking);
    CHECK(out[i].ranking == ranking_matrix_from_pose(out[i].pose3d));
  }
}

TEST_CASE("virtual cameras ring the optical center at the fitted distance") {
  const auto poses = some_poses(50, 5);
  const Vec3 target(0, 1000, 0);
  const auto rig = ring_rig(4, 5000.0, target);
  AugmentConfig cfg;
  cfg.seed = 5;
  cfg.dist_std = 0.0;
  const auto out = augment_dataset(poses, rig, NoiseConfig::none(), cfg);
  std::vector<OpticalAxis> axes;
  for (const auto& c : rig) axes.push_back(OpticalAxis::of(c));
  const Vec3 center = optical_center(axes);
  const double dist = fit_distance_distribution(rig, center).mean;
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Recover the rigid world -> camera map from the pose pair and express
    // the optical center in the camera frame: it lies on the axis at `dist`.
    const auto fit = procrustes_align(poses[i / 3].pose, out[i].pose3d);
    REQUIRE(std::abs(fit.scale - 1.0) < 1e-9);
    const Vec3 c = fit.rotation * center + fit.translation;
    REQUIRE(c.head<2>().norm() < 1e-6);
    REQUIRE(std::abs(c.z() - dist) < 1e-6);
    REQUIRE(out[i].ranking == ranking_matrix_from_pose(out[i].pose3d));
  }
}

TEST_CASE("flip rate of augmented rankings is calibrated") {
  const auto poses = some_poses(100, 6);
  const auto rig = ring_rig(3, 5000.0, Vec3(0, 1000, 0));
  for (double p : {0.5, 0.9, 1.0}) {
    NoiseConfig noise;
    noise.acc = AccuracyMatrix::uniform(p);
    AugmentConfig cfg;
    cfg.seed = 7;
    cfg.factor = 1;
    const auto out = augment_dataset(poses, rig, noise, cfg);
    // The clean relation is recomputed from the returned camera-frame pose.
    long flips = 0, pairs = 0;
    for (const auto& s : out) {
      const auto clean = ranking_matrix_from_pose(s.pose3d);
      for (int i = 0; i < kNumJoints; ++i)
        for (int j = i + 1; j < kNumJoints; ++j) {
          flips += s.ranking(i, j) != clean(i, j);
          ++pairs;
        }
    }
    REQUIRE(pairs >= 10000);
    const double q = 1.0 - p;
    const double rate = static_cast<double>(flips) / static_cast<double>(pairs);
    const double half_width = 2.5758 * std::sqrt(q * (1.0 - q) / static_cast<double>(pairs));
    CHECK(std::abs(rate - q) <= half_width);
  }
}

TEST_CASE("real-rig views keep camera provenance") {
  const auto poses = some_poses(30, 8);
  const auto rig = ring_rig(4, 5000.0, Vec3(0, 1000, 0));
  NoiseConfig noise;
  noise.gmm = NoiseConfig::default_gmm();
  const std::vector<int> ids = {3, 1};
  const auto out = view_dataset(poses, rig, ids, noise, 11);
  REQUIRE(out.size() == 60);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].camera == ids[i % 2]);
    CHECK_FALSE(out[i].augmented);
  }
  // A sample does not depend on which other cameras were requested.
  const std::vector<int> only = {1};
  const auto single = view_dataset(poses, rig, only, noise, 11);
  for (std::size_t k = 0; k < poses.size(); ++k) CHECK(single[k].pose2d.flat() == out[2 * k + 1].pose2d.flat());
  const std::vector<int> bad = {4};
  CHECK_THROWS_AS(view_dataset(poses, rig, bad, noise, 11), InputError);
}
