#include "vifuse/pipeline.h"

#include <limits>

namespace vifuse {

Mode ParseMode(const std::string& name) {
  if (name == "baseline") return Mode::kBaseline;
  if (name == "rto") return Mode::kRto;
  if (name == "sf2") return Mode::kSf2;
  if (name == "rtof") return Mode::kRtof;
  throw Error(ErrorCode::kInvalidConfig, "unknown mode '" + name + "'");
}

const char* ModeName(Mode mode) {
  switch (mode) {
    case Mode::kBaseline: return "baseline";
    case Mode::kRto: return "rto";
    case Mode::kSf2: return "sf2";
    case Mode::kRtof: return "rtof";
  }
  return "unknown";
}

void ValidateInputs(Mode mode, const PipelineInputs& in) {
  const std::string m = ModeName(mode);
  const bool visual = mode == Mode::kRto || mode == Mode::kRtof;
  const bool inertial = mode == Mode::kSf2 || mode == Mode::kRtof;
  if (visual) {
    if (in.keypoints.empty()) {
      throw Error(ErrorCode::kMissingInput, "mode " + m + " needs 2D keypoints");
    }
    if (!in.camera) throw Error(ErrorCode::kMissingInput, "mode " + m + " needs a camera");
    if (in.keypoints.size() != in.poses.size()) {
      throw Error(ErrorCode::kLengthMismatch, "keypoint and pose streams differ in length");
    }
  }
  if (inertial) {
    if (!in.imu || in.imu->frames.empty() || !in.calibration ||
        in.calibration->sensors.empty()) {
      throw Error(ErrorCode::kMissingInput, "mode " + m + " needs an IMU stream and calibration");
    }
    if (in.imu->frames.size() != in.poses.size()) {
      throw Error(ErrorCode::kLengthMismatch, "IMU and pose streams differ in length");
    }
    in.calibration->Validate(in.skeleton);
  }
  for (const Pose& p : in.poses) {
    if (p.cols() != in.skeleton.num_joints()) {
      throw Error(ErrorCode::kTopologyMismatch, "pose joint count differs from skeleton");
    }
  }
}

FusionResult SingleFrameFusion(const Skeleton& skel, const CalibrationSet& calib,
                               const std::vector<Pose>& poses, const ImuStream& imu,
                               double theta_t) {
  if (imu.frames.size() != poses.size()) {
    throw Error(ErrorCode::kLengthMismatch, "IMU and pose streams differ in length");
  }
  FusionResult out;
  out.poses.reserve(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) {
    const IgikResult r =
        InertialGuidedIk(skel, poses[i], CalibratedJointRotations(calib, imu.frames[i]), theta_t);
    for (bool b : r.replaced) out.replaced_rotations += b ? 1 : 0;
    out.poses.push_back(ForwardKinematics(skel, r.params));
  }
  return out;
}

SequenceInput BuildSequenceInput(const Skeleton& skel, double fps, const std::vector<Pose>& poses,
                                 const std::vector<Keypoints>& keypoints, const Camera& camera,
                                 const CalibrationSet* calib, const ImuStream* imu) {
  SequenceInput in;
  in.fps = fps;
  in.projection = camera.projection();
  std::vector<int> sensor_ids;
  if (calib != nullptr && imu != nullptr) {
    for (const auto& [k, s] : calib->sensors) {
      sensor_ids.push_back(k);
      in.sensors.push_back({s.joint, skel.parent(s.joint)});
    }
  }
  const int k = static_cast<int>(sensor_ids.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  in.frames.resize(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) {
    FrameInput& f = in.frames[i];
    f.pose = poses[i];
    if (!keypoints.empty()) f.keypoints = keypoints.at(i);
    f.imu_acceleration = Eigen::Matrix3Xd::Constant(3, k, nan);
    f.imu_bone = Eigen::Matrix3Xd::Constant(3, k, nan);
    if (k == 0) continue;
    for (const ImuSample& sample : imu->frames.at(i)) {
      for (int s = 0; s < k; ++s) {
        if (sensor_ids[s] != sample.sensor) continue;
        f.imu_acceleration.col(s) = CalibrateAcceleration(*calib, sample);
        f.imu_bone.col(s) = ImuBoneVector(*calib, skel, sample);
      }
    }
  }
  return in;
}

namespace {

RefineResult Optimize(const SequenceInput& seq, const PipelineOptions& options,
                      const EnergyConfig& cfg) {
  if (!options.streaming) return RefineSequence(seq, cfg, options.solver, options.threads);
  StreamingRefiner refiner(seq.fps, seq.projection, seq.sensors, cfg, options.solver);
  RefineResult result;
  for (const FrameInput& f : seq.frames) {
    for (Pose& p : refiner.Push(f)) result.poses.push_back(std::move(p));
  }
  for (Pose& p : refiner.Finish()) result.poses.push_back(std::move(p));
  result.stats = refiner.stats();
  return result;
}

}  // namespace

PipelineResult RunPipeline(Mode mode, const PipelineInputs& in, const PipelineOptions& options) {
  options.energy.Validate();
  ValidateInputs(mode, in);
  PipelineResult out;
  switch (mode) {
    case Mode::kBaseline:
      out.poses = in.poses;
      break;
    case Mode::kSf2: {
      FusionResult fused =
          SingleFrameFusion(in.skeleton, *in.calibration, in.poses, *in.imu, options.energy.theta_t);
      out.poses = std::move(fused.poses);
      out.replaced_rotations = fused.replaced_rotations;
      break;
    }
    case Mode::kRto: {
      EnergyConfig cfg = options.energy;
      cfg.k_inertial = 0.0;
      const SequenceInput seq =
          BuildSequenceInput(in.skeleton, in.fps, in.poses, in.keypoints, *in.camera, nullptr, nullptr);
      RefineResult refined = Optimize(seq, options, cfg);
      out.poses = std::move(refined.poses);
      out.stats = refined.stats;
      break;
    }
    case Mode::kRtof: {
      FusionResult fused =
          SingleFrameFusion(in.skeleton, *in.calibration, in.poses, *in.imu, options.energy.theta_t);
      out.replaced_rotations = fused.replaced_rotations;
      const SequenceInput seq = BuildSequenceInput(in.skeleton, in.fps, fused.poses, in.keypoints,
                                                   *in.camera, &*in.calibration, &*in.imu);
      RefineResult refined = Optimize(seq, options, options.energy);
      out.poses = std::move(refined.poses);
      out.stats = refined.stats;
      break;
    }
  }
  return out;
}

}  // namespace vifuse
