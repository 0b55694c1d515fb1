#include "drpose/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "drpose/camera.hpp"
#include "drpose/errors.hpp"

namespace drpose {

Pose2D project_orthogonal(const Pose3D& pose) {
  Pose2D out;
  for (int j = 0; j < kNumJoints; ++j) out[j] = pose[j].head<2>();
  return out;
}

Pose2D project_perspective_camera_frame(const Pose3D& pose_camera, double focal) {
  Pose2D out;
  for (int j = 0; j < kNumJoints; ++j) {
    const Vec3& p = pose_camera[j];
    if (!(p.z() > 0.0))
      throw ProjectionError("joint " + std::string(joint_name(j)) +
                            " is at or behind the camera plane");
    out[j] = focal * p.head<2>() / p.z();
  }
  return out;
}

Pose2D project_perspective(const Pose3D& pose_world, const Camera& cam) {
  Pose3D cam_frame;
  for (int j = 0; j < kNumJoints; ++j) cam_frame[j] = cam.to_camera(pose_world[j]);
  return project_perspective_camera_frame(cam_frame, cam.focal);
}

DepthMagnitude adjacent_depth_magnitude(double bone_length, double dx, double dy) {
  if (!(bone_length > 0.0)) throw InputError("bone length must be positive");
  const double radicand = bone_length * bone_length - dx * dx - dy * dy;
  if (radicand < 0.0) return {0.0, true};
  return {std::sqrt(radicand), false};
}

int Reconstruction::num_clamped() const {
  int n = 0;
  for (bool c : clamped) n += c ? 1 : 0;
  return n;
}

Reconstruction reconstruct_depths(const Pose2D& p2d, const RankingMatrix& m,
                                  const SkeletonTopology& topo, double root_depth) {
  // Re-validate: a RankingMatrix can only be built valid, but callers may
  // hand us one assembled from raw entries elsewhere.
  for (int i = 0; i < kNumJoints; ++i)
    for (int j = 0; j < kNumJoints; ++j)
      if (m(i, j) + m(j, i) != 1.0) throw InputError("reconstruct_depths: invalid ranking matrix");

  Reconstruction rec;
  const auto order = topo.traversal_order();
  for (int j = 0; j < kNumJoints; ++j) {
    rec.pose[j].head<2>() = p2d[j];
    rec.pose[j].z() = 0.0;
  }
  rec.pose[kRootJoint].z() = root_depth;

  for (int k = 1; k < kNumJoints; ++k) {
    const int c = order[static_cast<std::size_t>(k)];
    const int p = topo.parent[static_cast<std::size_t>(c)];
    const Vec2 d = p2d[c] - p2d[p];
    const auto mag = adjacent_depth_magnitude(topo.bone_length[static_cast<std::size_t>(c)],
                                              d.x(), d.y());
    rec.clamped[static_cast<std::size_t>(c)] = mag.clamped;
    double dz = 0.0;
    if (m(c, p) == 1.0)
      dz = mag.value;
    else if (m(c, p) == 0.0)
      dz = -mag.value;
    rec.pose[c].z() = rec.pose[p].z() + dz;
  }
  return rec;
}

std::array<double, kNumJoints> per_joint_error(const Pose3D& pred, const Pose3D& gt) {
  std::array<double, kNumJoints> err{};
  for (int j = 0; j < kNumJoints; ++j) err[static_cast<std::size_t>(j)] = (pred[j] - gt[j]).norm();
  return err;
}

double mpjpe(const Pose3D& pred, const Pose3D& gt) {
  double sum = 0.0;
  for (double e : per_joint_error(pred, gt)) sum += e;
  return sum / kNumJoints;
}

Alignment procrustes_align(const Pose3D& pred, const Pose3D& gt) {
  using Points = Eigen::Matrix<double, kNumJoints, 3>;
  Points x;
  Points y;
  for (int j = 0; j < kNumJoints; ++j) {
    x.row(j) = pred[j].transpose();
    y.row(j) = gt[j].transpose();
  }
  const Eigen::RowVector3d mu_x = x.colwise().mean();
  const Eigen::RowVector3d mu_y = y.colwise().mean();
  const Points xc = x.rowwise() - mu_x;
  const Points yc = y.rowwise() - mu_y;
  const double var_x = xc.squaredNorm() / kNumJoints;
  const double var_y = yc.squaredNorm() / kNumJoints;
  if (!(var_x > 0.0) || !(var_y > 0.0))
    throw DegenerateError("procrustes_align: pose has all joints coincident");

  const Mat3 cov = yc.transpose() * xc / kNumJoints;
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 d = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) d(2) = -1.0;

  Alignment a;
  a.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  a.scale = svd.singularValues().dot(d) / var_x;
  a.translation = mu_y.transpose() - a.scale * a.rotation * mu_x.transpose();
  for (int j = 0; j < kNumJoints; ++j)
    a.aligned[j] = a.scale * a.rotation * pred[j] + a.translation;
  a.error = mpjpe(a.aligned, gt);
  return a;
}

}  // namespace drpose
