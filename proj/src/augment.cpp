#include "drpose/augment.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "drpose/errors.hpp"
#include "drpose/geometry.hpp"

namespace drpose {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Frame {
  Vec3 center;
  DistanceStats dist;
  double focal = 1.0;
};

Frame fit_frame(std::span<const Camera> cams_train, const AugmentConfig& cfg) {
  if (cams_train.empty()) throw InputError("augment_dataset: no training cameras");
  Frame f;
  f.focal = 0.0;
  for (const auto& c : cams_train) f.focal += c.focal;
  f.focal /= static_cast<double>(cams_train.size());
  if (cfg.fixed_cameras) return f;

  std::vector<OpticalAxis> axes;
  axes.reserve(cams_train.size());
  for (const auto& c : cams_train) axes.push_back(OpticalAxis::of(c));
  f.center = optical_center(axes);
  f.dist = fit_distance_distribution(cams_train, f.center);
  if (cfg.dist_mean) f.dist.mean = *cfg.dist_mean;
  if (cfg.dist_std) f.dist.std = *cfg.dist_std;
  return f;
}

Sample make_sample(const WorldPose& wp, const Camera& cam, const NoiseConfig& noise, double eps,
                   std::mt19937_64& rng) {
  auto syn = synthesize_sample(wp.pose, cam, eps);
  Sample s;
  s.pose2d = noise.gmm.empty() ? syn.pose2d : gmm_noise_2d(syn.pose2d, noise.gmm, rng);
  s.ranking = noise.acc ? noisy_ranking_oracle(syn.ranking, *noise.acc, rng) : syn.ranking;
  s.pose3d = syn.pose3d;
  s.pose_id = wp.pose_id;
  s.subject = wp.subject;
  return s;
}

Sample augment_one(std::span<const WorldPose> poses, std::span<const Camera> cams_train,
                   const NoiseConfig& noise, const AugmentConfig& cfg, const Frame& frame,
                   std::size_t index) {
  const auto& wp = poses[index / static_cast<std::size_t>(cfg.factor)];
  auto rng = sample_rng(cfg.seed, index);
  Camera cam;
  int cam_id = -1;
  if (cfg.fixed_cameras) {
    cam_id = static_cast<int>(index % cams_train.size());
    cam = cams_train[static_cast<std::size_t>(cam_id)];
  } else {
    cam = sample_camera(frame.center, frame.dist.mean, frame.dist.std, frame.focal, rng);
  }
  Sample s = make_sample(wp, cam, noise, cfg.eps, rng);
  s.camera = cam_id;
  s.augmented = true;
  return s;
}

template <typename Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
  if (!parallel) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Exceptions must not cross the OpenMP region; keep the one from the
  // lowest index so the reported error matches the serial path.
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex mu;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

Dataset augment_impl(std::span<const WorldPose> poses, std::span<const Camera> cams_train,
                     const NoiseConfig& noise, const AugmentConfig& cfg, bool parallel) {
  cfg.validate();
  noise.validate();
  const Frame frame = fit_frame(cams_train, cfg);
  Dataset out(poses.size() * static_cast<std::size_t>(cfg.factor));
  for_each_index(out.size(), parallel, [&](std::size_t i) {
    out[i] = augment_one(poses, cams_train, noise, cfg, frame, i);
  });
  return out;
}

}  // namespace

void NoiseConfig::validate() const {
  if (gmm.empty()) return;
  double total = 0.0;
  for (const auto& c : gmm) {
    if (!(c.weight >= 0.0)) throw ConfigError("GMM weights must be non-negative");
    if (!c.mean.allFinite() || !c.cov.allFinite()) throw ConfigError("GMM parameters must be finite");
    if (std::abs(c.cov(0, 1) - c.cov(1, 0)) > 1e-12 * (1.0 + c.cov.cwiseAbs().maxCoeff()))
      throw ConfigError("GMM covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(c.cov);
    if (eig.eigenvalues()(0) < -1e-12 * (1.0 + c.cov.cwiseAbs().maxCoeff()))
      throw ConfigError("GMM covariance must be positive semi-definite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("GMM weights must sum to 1");
  if (acc) {
    for (double p : acc->p)
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("accuracy entries must lie in [0, 1]");
  }
}

std::vector<GmmComponent> NoiseConfig::default_gmm() {
  auto iso = [](double w, double sigma) {
    GmmComponent c;
    c.weight = w;
    c.cov = Eigen::Matrix2d::Identity() * sigma * sigma;
    return c;
  };
  return {iso(0.6, 1.5), iso(0.3, 4.0), iso(0.1, 10.0)};
}

void AugmentConfig::validate() const {
  if (factor < 1) throw ConfigError("augmentation factor must be >= 1");
  if (dist_std && !(*dist_std >= 0.0)) throw ConfigError("dist_std must be non-negative");
  if (dist_mean && !(*dist_mean > 0.0)) throw ConfigError("dist_mean must be positive");
  if (!(eps >= 0.0)) throw ConfigError("ranking tolerance must be non-negative");
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
  return std::mt19937_64(splitmix64(a ^ splitmix64(index)));
}

Synthesized synthesize_sample(const Pose3D& pose_world, const Camera& cam, double eps) {
  Synthesized s;
  for (int j = 0; j < kNumJoints; ++j) s.pose3d[j] = cam.to_camera(pose_world[j]);
  s.pose2d = project_perspective_camera_frame(s.pose3d, cam.focal);
  s.ranking = ranking_matrix_from_pose(s.pose3d, eps);
  return s;
}

Pose2D gmm_noise_2d(const Pose2D& p2d, std::span<const GmmComponent> gmm, std::mt19937_64& rng) {
  if (gmm.empty()) return p2d;
  NoiseConfig check;
  check.gmm.assign(gmm.begin(), gmm.end());
  check.validate();

  std::vector<double> weights;
  std::vector<Eigen::Matrix2d> factors;
  for (const auto& c : gmm) {
    weights.push_back(c.weight);
    // Symmetric square root handles singular (PSD) covariances.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(c.cov);
    const Vec2 sd = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factors.push_back(eig.eigenvectors() * sd.asDiagonal() * eig.eigenvectors().transpose());
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::normal_distribution<double> g(0.0, 1.0);
  Pose2D out;
  for (int j = 0; j < kNumJoints; ++j) {
    const std::size_t k = pick(rng);
    const double a = g(rng);
    const double b = g(rng);
    out[j] = p2d[j] + gmm[k].mean + factors[k] * Vec2(a, b);
  }
  return out;
}

Dataset augment_dataset(std::span<const WorldPose> poses, std::span<const Camera> cams_train,
                        const NoiseConfig& noise, const AugmentConfig& cfg) {
  return augment_impl(poses, cams_train, noise, cfg, true);
}

Dataset augment_dataset_serial(std::span<const WorldPose> poses, std::span<const Camera> cams_train,
                               const NoiseConfig& noise, const AugmentConfig& cfg) {
  return augment_impl(poses, cams_train, noise, cfg, false);
}

Dataset view_dataset(std::span<const WorldPose> poses, std::span<const Camera> cams,
                     std::span<const int> cam_ids, const NoiseConfig& noise, std::uint64_t seed,
                     double eps) {
  noise.validate();
  for (int id : cam_ids)
    if (id < 0 || static_cast<std::size_t>(id) >= cams.size())
      throw InputError("view_dataset: camera id out of range");
  const std::size_t per_pose = cam_ids.size();
  Dataset out(poses.size() * per_pose);
  for_each_index(out.size(), true, [&](std::size_t i) {
    const auto& wp = poses[i / per_pose];
    const int cam_id = cam_ids[i % per_pose];
    // Keyed by (pose id, camera id) so a sample does not depend on which
    // other cameras were requested alongside it.
    auto rng = sample_rng(seed, static_cast<std::uint64_t>(wp.pose_id) * cams.size() +
                                    static_cast<std::uint64_t>(cam_id), 1);
    Sample s = make_sample(wp, cams[static_cast<std::size_t>(cam_id)], noise, eps, rng);
    s.camera = cam_id;
    s.augmented = false;
    out[i] = s;
  });
  return out;
}

}  // namespace drpose
