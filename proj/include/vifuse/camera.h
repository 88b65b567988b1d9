#pragma once

#include <vector>

#include <Eigen/Core>

#include "vifuse/rotation.h"
#include "vifuse/skeleton.h"

namespace vifuse {

using Matrix34d = Eigen::Matrix<double, 3, 4>;

// 2D joint locations of a frame (px), one column per joint. Occluded joints
// hold NaN in both rows.
using Keypoints = Eigen::Matrix2Xd;

// Pinhole camera: x ~ K (R X + t), X in mm, x in px.
struct Camera {
  double fx = 1000.0;
  double fy = 1000.0;
  double cx = 500.0;
  double cy = 500.0;
  Rotationd world_to_camera;
  Vec3 translation = Vec3::Zero();

  Eigen::Matrix3d intrinsics() const;
  Matrix34d projection() const;
  Vec3 center() const;

  // Looking from `eye` towards `target`, image y pointing along -`up`.
  static Camera LookAt(const Vec3& eye, const Vec3& target, const Vec3& up);
};

// Smallest admissible homogeneous depth before a point counts as behind the
// camera.
inline constexpr double kMinProjectiveDepth = 1e-6;

Eigen::Vector2d Project(const Matrix34d& projection, const Vec3& point);

// Projects every joint of every pose; throws kBehindCamera naming the frame
// and joint at fault.
std::vector<Keypoints> ProjectSequence(const Camera& camera, const std::vector<Pose>& poses);

}  // namespace vifuse
