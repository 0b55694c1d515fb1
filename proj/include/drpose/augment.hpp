#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "drpose/camera.hpp"
#include "drpose/ranking.hpp"
#include "drpose/skeleton.hpp"

namespace drpose {

struct GmmComponent {
  double weight = 1.0;
  Vec2 mean = Vec2::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

struct NoiseConfig {
  // Empty mixture: 2D joints are left untouched.
  std::vector<GmmComponent> gmm;
  // Unset: ranking matrices are left untouched.
  std::optional<AccuracyMatrix> acc;

  // Throws ConfigError for negative weights, weights not summing to one,
  // or covariances that are not symmetric positive semi-definite.
  void validate() const;

  static NoiseConfig none() { return {}; }
  // Three-component mixture of small, medium and outlier-scale jitter.
  static std::vector<GmmComponent> default_gmm();
};

// A world-frame pose seen by a camera: the training/evaluation record.
struct Sample {
  Pose2D pose2d;
  RankingMatrix ranking;
  Pose3D pose3d;  // camera frame, mm
  int pose_id = 0;
  int subject = 0;
  int camera = -1;  // -1 for virtual cameras
  bool augmented = false;
};

using Dataset = std::vector<Sample>;

struct Synthesized {
  Pose2D pose2d;
  RankingMatrix ranking;
  Pose3D pose3d;
};

Synthesized synthesize_sample(const Pose3D& pose_world, const Camera& cam, double eps = 0.0);

Pose2D gmm_noise_2d(const Pose2D& p2d, std::span<const GmmComponent> gmm, std::mt19937_64& rng);

struct AugmentConfig {
  int factor = 3;
  // Unset: fitted from the training cameras around their optical center.
  std::optional<double> dist_mean;
  std::optional<double> dist_std;
  std::uint64_t seed = 0;
  double eps = 0.0;
  // Reuse the training cameras round-robin instead of sampling virtual ones.
  bool fixed_cameras = false;

  void validate() const;
};

struct WorldPose {
  Pose3D pose;
  int pose_id = 0;
  int subject = 0;
};

// Per-sample generator derived from (seed, sample index) only, so serial and
// parallel runs draw identical numbers.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0);

// factor x poses.size() samples from virtual cameras sampled around the
// optical center of `cams_train`, with 2D mixture noise and ranking flips.
Dataset augment_dataset(std::span<const WorldPose> poses, std::span<const Camera> cams_train,
                        const NoiseConfig& noise, const AugmentConfig& cfg);

// Single-threaded reference for augment_dataset; output is identical.
Dataset augment_dataset_serial(std::span<const WorldPose> poses, std::span<const Camera> cams_train,
                               const NoiseConfig& noise, const AugmentConfig& cfg);

// Every pose seen from each of `cam_ids` of the real rig, with the same noise
// model applied. Camera provenance is kept on every sample.
Dataset view_dataset(std::span<const WorldPose> poses, std::span<const Camera> cams,
                     std::span<const int> cam_ids, const NoiseConfig& noise, std::uint64_t seed,
                     double eps = 0.0);

}  // namespace drpose
