#pragma once

#include <map>
#include <vector>

#include "vifuse/rotation.h"
#include "vifuse/skeleton.h"

namespace vifuse {

// One raw IMU reading. The orientation is the sensor frame w.r.t. the
// sensor's own reference frame; the acceleration is the accelerometer
// output in the sensor frame (mm/s^2, gravity included).
struct ImuSample {
  int sensor = 0;
  Rotationd orientation;
  Vec3 acceleration = Vec3::Zero();
};

struct SensorCalibration {
  int joint = -1;            // bound joint j(k)
  Rotationd ref_to_global;   // R_kg
  Rotationd ref_to_joint;    // R_kj
};

// Accelerometer convention: after rotating a reading into the global frame a
// stationary sensor reads exactly `gravity`, so subtracting `gravity` yields
// the kinematic acceleration.
struct CalibrationSet {
  std::map<int, SensorCalibration> sensors;
  Vec3 gravity{0.0, -9810.0, 0.0};

  const SensorCalibration& sensor(int k) const;

  // Throws kUnboundJoint when a sensor points at a missing or root joint, or
  // two sensors share a joint.
  void Validate(const Skeleton& skel) const;
};

// Eq. (R_kj)^-1 R_kg R_k: the IMU-measured global rotation of the bound joint.
Rotationd CalibrateOrientation(const CalibrationSet& calib, const ImuSample& sample);

// Gravity-free global acceleration R_kg R_k a_rec - g.
Vec3 CalibrateAcceleration(const CalibrationSet& calib, const ImuSample& sample);

// IMU-measured bone of the bound joint: calibrated rotation applied to the
// T-pose bone. Its length equals the T-pose bone length.
Vec3 ImuBoneVector(const CalibrationSet& calib, const Skeleton& skel, const ImuSample& sample);

// Per-frame joint -> calibrated global rotation map, the IGIK input.
std::map<int, Rotationd> CalibratedJointRotations(const CalibrationSet& calib,
                                                  const std::vector<ImuSample>& frame);

// A sequence of IMU readings, frames[i] holds every sensor's sample at frame i.
struct ImuStream {
  double fps = 25.0;
  std::vector<std::vector<ImuSample>> frames;
};

// Shipped sensor layout: eight IMUs on upper arms, forearms, thighs and
// shanks. Each binds to the child joint of its bone, with the given offsets.
CalibrationSet DefaultCalibration(const Skeleton& skel);

}  // namespace vifuse
