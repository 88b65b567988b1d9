#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vifuse/rotation.h"

namespace vifuse {

// Joint positions of a single frame, one column per joint (mm).
using Pose = Eigen::Matrix3Xd;

struct Joint {
  std::string name;
  int parent = -1;  // -1 for the root
};

// Kinematic tree with its rest T-pose. Joints are stored in topological order
// (parent index < joint index) and joint 0 is the single root.
class Skeleton {
 public:
  Skeleton(std::vector<Joint> joints, Pose tpose);

  int num_joints() const { return static_cast<int>(joints_.size()); }
  const std::vector<Joint>& joints() const { return joints_; }
  const Joint& joint(int j) const { return joints_[j]; }
  int parent(int j) const { return joints_[j].parent; }
  const Pose& tpose() const { return tpose_; }

  // B_j^T = tpose[j] - tpose[parent(j)]; the root column is zero.
  const Eigen::Matrix3Xd& tpose_bones() const { return bones_; }
  Vec3 tpose_bone(int j) const { return bones_.col(j); }

  // Index of the named joint, or -1.
  int FindJoint(const std::string& name) const;

 private:
  std::vector<Joint> joints_;
  Pose tpose_;
  Eigen::Matrix3Xd bones_;
};

// 21-joint body (hips, four spine segments, neck, head, arms and legs) in a
// T-pose standing on y = 0, facing +z, y up.
Skeleton DefaultSkeleton();

// Root translation plus one local rotation per joint. local_rotations[0]
// belongs to the root and is ignored; the root carries no rotation.
struct MotionParams {
  Vec3 root_translation = Vec3::Zero();
  std::vector<Rotationd> local_rotations;

  static MotionParams Identity(const Skeleton& skel);
};

// Per-joint global rotations accumulated root to leaf.
std::vector<Rotationd> GlobalRotations(const Skeleton& skel, const MotionParams& params);

Pose ForwardKinematics(const Skeleton& skel, const MotionParams& params);

// Visual-only inverse kinematics: each bone's global rotation is the minimal
// rotation from its T-pose bone to the observed bone. Forward kinematics of
// the result reproduces every bone direction with T-pose bone lengths.
MotionParams InverseKinematics(const Skeleton& skel, const Pose& pose);

struct IgikResult {
  MotionParams params;
  std::vector<bool> replaced;       // joint j took its IMU rotation
  std::vector<double> imu_angles;   // theta_k per joint, NaN when no IMU
};

// Inertial-guided IK. `imu_rotations` maps a joint to its IMU-measured global
// rotation. When the IMU bone direction deviates from the observed bone by
// more than `theta_t` radians the IMU rotation replaces the visual one, and
// the replacement carries into every descendant.
IgikResult InertialGuidedIk(const Skeleton& skel, const Pose& pose,
                            const std::map<int, Rotationd>& imu_rotations,
                            double theta_t);

}  // namespace vifuse
