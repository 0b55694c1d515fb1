#include "drpose/camera.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "drpose/errors.hpp"

namespace drpose {

namespace {

// |vertical component| above which a viewing direction is treated as
// top-down and redrawn.
constexpr double kMaxVerticalComponent = 0.999;

}  // namespace

Camera Camera::look_at(const Vec3& position, const Vec3& target, double focal) {
  const Vec3 diff = target - position;
  if (!(diff.norm() > 0.0)) throw DegenerateError("look_at: target coincides with camera");
  const Vec3 f = diff.normalized();
  const Vec3 side = kWorldUp.cross(f);
  if (side.norm() < 1e-12) throw DegenerateError("look_at: viewing direction is vertical");
  const Vec3 x = side.normalized();
  const Vec3 y = f.cross(x);
  Camera cam;
  cam.position = position;
  cam.rotation.row(0) = x.transpose();
  cam.rotation.row(1) = y.transpose();
  cam.rotation.row(2) = f.transpose();
  cam.focal = focal;
  return cam;
}

bool Camera::valid(double tol) const {
  if (!rotation.allFinite() || !position.allFinite() || !std::isfinite(focal)) return false;
  if (((rotation.transpose() * rotation) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol)
    return false;
  if (std::abs(rotation.determinant() - 1.0) > tol) return false;
  return std::abs(rotation.row(0).dot(kWorldUp.transpose())) <= tol;
}

OpticalAxis OpticalAxis::make(const Vec3& origin, const Vec3& direction) {
  const double n = direction.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError("optical axis direction must be non-zero");
  return {origin, direction / n};
}

double distance_to_axis(const Vec3& point, const OpticalAxis& axis) {
  const Vec3 r = point - axis.origin;
  return (r - r.dot(axis.direction) * axis.direction).norm();
}

Vec3 optical_center(std::span<const OpticalAxis> axes) {
  if (axes.size() < 2) throw InputError("optical_center needs at least two axes");
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto& axis : axes) {
    const Mat3 proj = Mat3::Identity() - axis.direction * axis.direction.transpose();
    a += proj;
    b += proj * axis.origin;
  }
  // Each projector has eigenvalues {0, 1, 1}; parallel axes leave the sum
  // with a zero eigenvalue along the shared direction.
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
  const double smallest = eig.eigenvalues()(0);
  if (smallest < 1e-10 * static_cast<double>(axes.size()))
    throw DegenerateError("optical_center: axes are (nearly) parallel");
  return a.ldlt().solve(b);
}

DistanceStats fit_distance_distribution(std::span<const Camera> cams, const Vec3& center) {
  if (cams.empty()) throw InputError("fit_distance_distribution needs at least one camera");
  double sum = 0.0;
  for (const auto& c : cams) sum += (c.position - center).norm();
  const double n = static_cast<double>(cams.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto& c : cams) {
    const double d = (c.position - center).norm() - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / n)};
}

Vec3 sample_unit_sphere(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    Vec3 v(g(rng), g(rng), g(rng));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Camera sample_camera(const Vec3& center, double dist_mean, double dist_std, double focal,
                     std::mt19937_64& rng) {
  if (!(dist_mean > 0.0)) throw InputError("sample_camera: dist_mean must be positive");
  if (!(dist_std >= 0.0)) throw InputError("sample_camera: dist_std must be non-negative");
  Vec3 dir = sample_unit_sphere(rng);
  while (std::abs(dir.dot(kWorldUp)) > kMaxVerticalComponent) dir = sample_unit_sphere(rng);

  double dist = dist_mean;
  if (dist_std > 0.0) {
    std::normal_distribution<double> nd(dist_mean, dist_std);
    do {
      dist = nd(rng);
    } while (!(dist > 0.1 * dist_mean));
  }
  return Camera::look_at(center + dist * dir, center, focal);
}

}  // namespace drpose
