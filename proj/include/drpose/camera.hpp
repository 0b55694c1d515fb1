#pragma once

#include <random>
#include <span>
#include <vector>

#include "drpose/skeleton.hpp"

namespace drpose {

// World y is vertical. The camera frame has x parallel to the ground plane,
// y in the vertical plane of the optical axis and z along the optical axis.
inline const Vec3 kWorldUp{0.0, 1.0, 0.0};

struct Camera {
  Vec3 position = Vec3::Zero();
  // World -> camera rotation; rows are the camera axes in world coordinates.
  Mat3 rotation = Mat3::Identity();
  double focal = 1.0;

  Vec3 to_camera(const Vec3& world) const { return rotation * (world - position); }
  Vec3 forward() const { return rotation.row(2).transpose(); }

  // Camera at `position` whose optical axis passes through `target`.
  // Throws DegenerateError when looking straight up or down.
  static Camera look_at(const Vec3& position, const Vec3& target, double focal);

  // Orthonormality, det = +1 and a horizontal x axis, all within `tol`.
  bool valid(double tol = 1e-9) const;
};

struct OpticalAxis {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();

  // Normalizes `direction`; throws InputError for a zero vector.
  static OpticalAxis make(const Vec3& origin, const Vec3& direction);
  static OpticalAxis of(const Camera& cam) { return make(cam.position, cam.forward()); }
};

double distance_to_axis(const Vec3& point, const OpticalAxis& axis);

// Point minimizing the summed squared distance to the given lines. Throws
// InputError for fewer than two axes and DegenerateError when the normal
// equations are singular (all axes parallel).
Vec3 optical_center(std::span<const OpticalAxis> axes);

struct DistanceStats {
  double mean = 0.0;
  double std = 0.0;
};

DistanceStats fit_distance_distribution(std::span<const Camera> cams, const Vec3& center);

Vec3 sample_unit_sphere(std::mt19937_64& rng);

// Virtual camera on a sphere around `center`. The distance is drawn from
// Normal(dist_mean, dist_std) and redrawn until it exceeds 0.1 * dist_mean;
// directions within ~2.6 degrees of vertical are redrawn.
Camera sample_camera(const Vec3& center, double dist_mean, double dist_std, double focal,
                     std::mt19937_64& rng);

}  // namespace drpose
