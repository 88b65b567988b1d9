#include "vifuse/camera.h"

#include <string>

namespace vifuse {

Eigen::Matrix3d Camera::intrinsics() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Matrix34d Camera::projection() const {
  Matrix34d extrinsics;
  extrinsics.leftCols<3>() = world_to_camera.matrix();
  extrinsics.col(3) = translation;
  return intrinsics() * extrinsics;
}

Vec3 Camera::center() const { return -(world_to_camera.inverse() * translation); }

Camera Camera::LookAt(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(up).normalized();
  const Vec3 y = z.cross(x);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  Camera cam;
  cam.world_to_camera = Rotationd::FromMatrix(r);
  cam.translation = -(cam.world_to_camera * eye);
  return cam;
}

Eigen::Vector2d Project(const Matrix34d& projection, const Vec3& point) {
  const Vec3 h = projection.leftCols<3>() * point + projection.col(3);
  if (!(h.z() > kMinProjectiveDepth)) {
    throw Error(ErrorCode::kBehindCamera, "point has projective depth " + std::to_string(h.z()));
  }
  return h.head<2>() / h.z();
}

std::vector<Keypoints> ProjectSequence(const Camera& camera, const std::vector<Pose>& poses) {
  const Matrix34d p = camera.projection();
  std::vector<Keypoints> out;
  out.reserve(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) {
    Keypoints kp(2, poses[i].cols());
    for (Eigen::Index j = 0; j < poses[i].cols(); ++j) {
      try {
        kp.col(j) = Project(p, poses[i].col(j));
      } catch (const Error& e) {
        throw Error(ErrorCode::kBehindCamera, "frame " + std::to_string(i) + " joint " +
                                                  std::to_string(j) + " is behind the camera");
      }
    }
    out.push_back(std::move(kp));
  }
  return out;
}

}  // namespace vifuse
