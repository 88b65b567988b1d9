#include "vifuse/skeleton.h"

#include <cmath>
#include <limits>
#include <set>
#include <utility>

namespace vifuse {

Skeleton::Skeleton(std::vector<Joint> joints, Pose tpose)
    : joints_(std::move(joints)), tpose_(std::move(tpose)) {
  const int n = num_joints();
  if (n == 0) {
    throw Error(ErrorCode::kTopologyMismatch, "skeleton has no joints");
  }
  if (tpose_.cols() != n) {
    throw Error(ErrorCode::kTopologyMismatch, "T-pose column count differs from joint count");
  }
  if (!tpose_.allFinite()) {
    throw Error(ErrorCode::kTopologyMismatch, "T-pose has non-finite coordinates");
  }
  std::set<std::string> names;
  for (int j = 0; j < n; ++j) {
    const int p = joints_[j].parent;
    if (j == 0 && p != -1) {
      throw Error(ErrorCode::kTopologyMismatch, "joint 0 must be the root");
    }
    if (j > 0 && (p < 0 || p >= j)) {
      throw Error(ErrorCode::kTopologyMismatch,
                  "joint '" + joints_[j].name + "' must have a parent listed before it");
    }
    if (!names.insert(joints_[j].name).second) {
      throw Error(ErrorCode::kTopologyMismatch, "duplicate joint name '" + joints_[j].name + "'");
    }
  }
  bones_ = Eigen::Matrix3Xd::Zero(3, n);
  for (int j = 1; j < n; ++j) {
    bones_.col(j) = tpose_.col(j) - tpose_.col(joints_[j].parent);
    if (!(bones_.col(j).norm() > 1e-6)) {
      throw Error(ErrorCode::kDegenerateBone,
                  "T-pose bone of joint '" + joints_[j].name + "' has zero length");
    }
  }
}

int Skeleton::FindJoint(const std::string& name) const {
  for (int j = 0; j < num_joints(); ++j) {
    if (joints_[j].name == name) return j;
  }
  return -1;
}

Skeleton DefaultSkeleton() {
  struct Def {
    const char* name;
    const char* parent;
    double x, y, z;
  };
  // Subject's left is +x.
  static const Def kDefs[] = {
      {"Hips", nullptr, 0, 950, 0},
      {"Spine", "Hips", 0, 1060, -10},
      {"Spine1", "Spine", 0, 1170, -15},
      {"Spine2", "Spine1", 0, 1280, -15},
      {"Spine3", "Spine2", 0, 1390, -10},
      {"Neck", "Spine3", 0, 1500, 0},
      {"Head", "Neck", 0, 1640, 20},
      {"RightShoulder", "Spine3", -60, 1440, 0},
      {"RightArm", "RightShoulder", -190, 1440, 0},
      {"RightForeArm", "RightArm", -470, 1440, 0},
      {"RightHand", "RightForeArm", -720, 1440, 0},
      {"LeftShoulder", "Spine3", 60, 1440, 0},
      {"LeftArm", "LeftShoulder", 190, 1440, 0},
      {"LeftForeArm", "LeftArm", 470, 1440, 0},
      {"LeftHand", "LeftForeArm", 720, 1440, 0},
      {"RightUpLeg", "Hips", -100, 900, 0},
      {"RightLeg", "RightUpLeg", -100, 480, 10},
      {"RightFoot", "RightLeg", -100, 80, -10},
      {"LeftUpLeg", "Hips", 100, 900, 0},
      {"LeftLeg", "LeftUpLeg", 100, 480, 10},
      {"LeftFoot", "LeftLeg", 100, 80, -10},
  };
  std::vector<Joint> joints;
  Pose tpose(3, std::size(kDefs));
  for (const Def& d : kDefs) {
    int parent = -1;
    if (d.parent != nullptr) {
      for (int i = 0; i < static_cast<int>(joints.size()); ++i) {
        if (joints[i].name == d.parent) parent = i;
      }
    }
    tpose.col(static_cast<Eigen::Index>(joints.size())) = Vec3(d.x, d.y, d.z);
    joints.push_back({d.name, parent});
  }
  return Skeleton(std::move(joints), std::move(tpose));
}

MotionParams MotionParams::Identity(const Skeleton& skel) {
  MotionParams params;
  params.root_translation = skel.tpose().col(0);
  params.local_rotations.assign(skel.num_joints(), Rotationd::Identity());
  return params;
}

namespace {

void CheckTopology(const Skeleton& skel, const MotionParams& params) {
  if (static_cast<int>(params.local_rotations.size()) != skel.num_joints()) {
    throw Error(ErrorCode::kTopologyMismatch,
                "motion has " + std::to_string(params.local_rotations.size()) +
                    " rotations for a skeleton of " + std::to_string(skel.num_joints()) +
                    " joints");
  }
}

void CheckPose(const Skeleton& skel, const Pose& pose) {
  if (pose.cols() != skel.num_joints()) {
    throw Error(ErrorCode::kTopologyMismatch, "pose joint count differs from skeleton");
  }
}

Vec3 ObservedBone(const Skeleton& skel, const Pose& pose, int j) {
  const Vec3 bone = pose.col(j) - pose.col(skel.parent(j));
  if (!(bone.norm() > 1e-9)) {
    throw Error(ErrorCode::kDegenerateBone,
                "observed bone of joint '" + skel.joint(j).name + "' collapsed");
  }
  return bone;
}

}  // namespace

std::vector<Rotationd> GlobalRotations(const Skeleton& skel, const MotionParams& params) {
  CheckTopology(skel, params);
  std::vector<Rotationd> global(skel.num_joints());
  for (int j = 1; j < skel.num_joints(); ++j) {
    global[j] = global[skel.parent(j)] * params.local_rotations[j];
  }
  return global;
}

Pose ForwardKinematics(const Skeleton& skel, const MotionParams& params) {
  const std::vector<Rotationd> global = GlobalRotations(skel, params);
  Pose pose(3, skel.num_joints());
  pose.col(0) = params.root_translation;
  for (int j = 1; j < skel.num_joints(); ++j) {
    pose.col(j) = pose.col(skel.parent(j)) + global[j] * skel.tpose_bone(j);
  }
  return pose;
}

MotionParams InverseKinematics(const Skeleton& skel, const Pose& pose) {
  return InertialGuidedIk(skel, pose, {}, 0.0).params;
}

IgikResult InertialGuidedIk(const Skeleton& skel, const Pose& pose,
                            const std::map<int, Rotationd>& imu_rotations,
                            double theta_t) {
  CheckPose(skel, pose);
  const int n = skel.num_joints();
  for (const auto& [joint, rotation] : imu_rotations) {
    if (joint <= 0 || joint >= n) {
      throw Error(ErrorCode::kUnboundJoint,
                  "IMU rotation bound to joint index " + std::to_string(joint) +
                      " which is not a non-root joint");
    }
  }

  IgikResult result;
  result.params.root_translation = pose.col(0);
  result.params.local_rotations.assign(n, Rotationd::Identity());
  result.replaced.assign(n, false);
  result.imu_angles.assign(n, std::numeric_limits<double>::quiet_NaN());

  std::vector<Rotationd> global(n);
  for (int j = 1; j < n; ++j) {
    const Vec3 bone = ObservedBone(skel, pose, j);
    global[j] = SolveRotation(skel.tpose_bone(j), bone);
    if (auto it = imu_rotations.find(j); it != imu_rotations.end()) {
      const Vec3 imu_bone = it->second * skel.tpose_bone(j);
      const double theta = AngleBetween(imu_bone, bone);
      result.imu_angles[j] = theta;
      if (theta > theta_t) {
        global[j] = it->second;
        result.replaced[j] = true;
      }
    }
    result.params.local_rotations[j] = global[skel.parent(j)].inverse() * global[j];
  }
  return result;
}

}  // namespace vifuse
