#include "vifuse/imu.h"

#include <set>
#include <string>

namespace vifuse {

const SensorCalibration& CalibrationSet::sensor(int k) const {
  auto it = sensors.find(k);
  if (it == sensors.end()) {
    throw Error(ErrorCode::kUnknownSensor, "sensor " + std::to_string(k) + " is not calibrated");
  }
  return it->second;
}

void CalibrationSet::Validate(const Skeleton& skel) const {
  std::set<int> bound;
  for (const auto& [k, s] : sensors) {
    if (s.joint <= 0 || s.joint >= skel.num_joints()) {
      throw Error(ErrorCode::kUnboundJoint,
                  "sensor " + std::to_string(k) + " is bound to joint " +
                      std::to_string(s.joint) + " which has no bone");
    }
    if (!bound.insert(s.joint).second) {
      throw Error(ErrorCode::kUnboundJoint,
                  "joint '" + skel.joint(s.joint).name + "' carries more than one sensor");
    }
  }
  if (!gravity.allFinite()) {
    throw Error(ErrorCode::kInvalidConfig, "gravity vector is not finite");
  }
}

Rotationd CalibrateOrientation(const CalibrationSet& calib, const ImuSample& sample) {
  const SensorCalibration& s = calib.sensor(sample.sensor);
  return s.ref_to_joint.inverse() * s.ref_to_global * sample.orientation;
}

Vec3 CalibrateAcceleration(const CalibrationSet& calib, const ImuSample& sample) {
  const SensorCalibration& s = calib.sensor(sample.sensor);
  return s.ref_to_global * (sample.orientation * sample.acceleration) - calib.gravity;
}

Vec3 ImuBoneVector(const CalibrationSet& calib, const Skeleton& skel, const ImuSample& sample) {
  const SensorCalibration& s = calib.sensor(sample.sensor);
  if (s.joint <= 0 || s.joint >= skel.num_joints()) {
    throw Error(ErrorCode::kDegenerateBone,
                "sensor " + std::to_string(sample.sensor) + " is not bound to a bone");
  }
  return CalibrateOrientation(calib, sample) * skel.tpose_bone(s.joint);
}

std::map<int, Rotationd> CalibratedJointRotations(const CalibrationSet& calib,
                                                  const std::vector<ImuSample>& frame) {
  std::map<int, Rotationd> out;
  for (const ImuSample& sample : frame) {
    out[calib.sensor(sample.sensor).joint] = CalibrateOrientation(calib, sample);
  }
  return out;
}

CalibrationSet DefaultCalibration(const Skeleton& skel) {
  static const char* kJoints[] = {"RightForeArm", "RightHand", "LeftForeArm", "LeftHand",
                                  "RightLeg",     "RightFoot", "LeftLeg",     "LeftFoot"};
  CalibrationSet calib;
  int k = 0;
  for (const char* name : kJoints) {
    const int j = skel.FindJoint(name);
    if (j < 0) {
      throw Error(ErrorCode::kUnboundJoint, std::string("skeleton lacks joint ") + name);
    }
    SensorCalibration s;
    s.joint = j;
    // Fixed, distinct offsets so calibration is exercised end to end.
    s.ref_to_global = Rotationd::FromAxisAngle(Vec3(0.2, 1.0, 0.1), 0.3 + 0.17 * k);
    s.ref_to_joint = Rotationd::FromAxisAngle(Vec3(1.0, -0.3, 0.5), 0.5 - 0.11 * k);
    calib.sensors[k++] = s;
  }
  return calib;
}

}  // namespace vifuse
