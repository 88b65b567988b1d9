#include "vifuse/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace vifuse {

int MotionScript::num_frames() const {
  return static_cast<int>(std::lround(duration * fps));
}

MotionParams MotionScript::Evaluate(const Skeleton& skel, double t) const {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  MotionParams params = MotionParams::Identity(skel);
  params.root_translation = root_origin;
  for (const TranslationSinusoid& s : root_motion) {
    params.root_translation += s.amplitude * std::sin(kTwoPi * s.frequency * t + s.phase);
  }
  for (const auto& [joint, parts] : joint_motion) {
    if (joint <= 0 || joint >= skel.num_joints()) {
      throw Error(ErrorCode::kUnboundJoint, "motion script drives joint " + std::to_string(joint));
    }
    Rotationd r;
    for (const Sinusoid& s : parts) {
      r = r * Rotationd::FromAxisAngle(s.axis,
                                       s.amplitude * std::sin(kTwoPi * s.frequency * t + s.phase));
    }
    params.local_rotations[joint] = r;
  }
  return params;
}

MotionScript DefaultMotionScript(const Skeleton& skel, double fps, double duration) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  MotionScript script;
  script.fps = fps;
  script.duration = duration;
  script.root_origin = skel.tpose().col(0);
  script.root_motion = {
      {Vec3(50.0, 0.0, 0.0), 0.4, 0.0},
      {Vec3(0.0, 20.0, 0.0), 1.6, 0.3},
      {Vec3(0.0, 0.0, 120.0), 0.2, 1.0},
  };
  auto at = [&](const char* name) {
    const int j = skel.FindJoint(name);
    if (j < 0) throw Error(ErrorCode::kUnboundJoint, std::string("skeleton lacks ") + name);
    return j;
  };
  const double gait = 0.8;  // Hz
  const Vec3 x = Vec3::UnitX();
  const Vec3 y = Vec3::UnitY();
  const Vec3 z = Vec3::UnitZ();
  auto constant = [&](const Vec3& axis, double angle) { return Sinusoid{axis, angle, 0.0, kHalfPi}; };

  script.joint_motion[at("Spine")] = {{z, 0.06, 0.4, 0.0}, {y, 0.10, gait, 0.5}};
  script.joint_motion[at("Spine2")] = {{x, 0.05, gait * 2.0, 0.2}};
  script.joint_motion[at("Neck")] = {{x, 0.10, 0.3, 0.0}, {y, 0.15, 0.23, 1.0}};
  script.joint_motion[at("Head")] = {{x, 0.08, 0.5, 0.7}};

  // Upper arms: lowered from the T-pose, swinging opposite to the legs.
  script.joint_motion[at("RightForeArm")] = {{x, 0.55, gait, 0.0}, constant(z, 1.15),
                                             {z, 0.15, 0.37, 0.4}};
  script.joint_motion[at("LeftForeArm")] = {{x, 0.55, gait, std::numbers::pi},
                                            constant(z, -1.15), {z, 0.15, 0.29, 1.3}};
  // Elbows flex between roughly 0.3 and 1.3 rad.
  script.joint_motion[at("RightHand")] = {constant(y, 0.8), {y, 0.5, gait, 0.9}};
  script.joint_motion[at("LeftHand")] = {constant(y, -0.8), {y, 0.5, gait, 0.9 + std::numbers::pi}};
  // Hips swing, knees flex only backwards.
  script.joint_motion[at("RightLeg")] = {{x, 0.45, gait, std::numbers::pi}, {z, 0.06, 0.31, 0.0}};
  script.joint_motion[at("LeftLeg")] = {{x, 0.45, gait, 0.0}, {z, 0.06, 0.27, 2.0}};
  script.joint_motion[at("RightFoot")] = {constant(x, 0.5), {x, 0.4, gait, std::numbers::pi - 1.0}};
  script.joint_motion[at("LeftFoot")] = {constant(x, 0.5), {x, 0.4, gait, -1.0}};
  return script;
}

Truth GenerateTruth(const MotionScript& script, const Skeleton& skel) {
  Truth truth;
  const int n = script.num_frames();
  truth.poses.reserve(n);
  truth.params.reserve(n);
  for (int i = 0; i < n; ++i) {
    truth.params.push_back(script.Evaluate(skel, i / script.fps));
    truth.poses.push_back(ForwardKinematics(skel, truth.params.back()));
  }
  return truth;
}

ImuStream DeriveImu(const std::vector<MotionParams>& params, const Skeleton& skel,
                    const CalibrationSet& calib, double fps) {
  calib.Validate(skel);
  const int n = static_cast<int>(params.size());
  ImuStream stream;
  stream.fps = fps;
  stream.frames.resize(n);

  std::vector<Pose> poses;
  std::vector<std::vector<Rotationd>> global;
  poses.reserve(n);
  global.reserve(n);
  for (const MotionParams& p : params) {
    poses.push_back(ForwardKinematics(skel, p));
    global.push_back(GlobalRotations(skel, p));
  }

  auto acceleration = [&](int i, int joint) -> Vec3 {
    if (n < 3) return Vec3::Zero();
    const int c = std::clamp(i, 1, n - 2);
    return (poses[c + 1].col(joint) - 2.0 * poses[c].col(joint) + poses[c - 1].col(joint)) *
           (fps * fps);
  };

  for (int i = 0; i < n; ++i) {
    for (const auto& [k, s] : calib.sensors) {
      ImuSample sample;
      sample.sensor = k;
      sample.orientation = s.ref_to_global.inverse() * s.ref_to_joint * global[i][s.joint];
      const Rotationd sensor_to_global = s.ref_to_global * sample.orientation;
      sample.acceleration = sensor_to_global.inverse() * (acceleration(i, s.joint) + calib.gravity);
      stream.frames[i].push_back(sample);
    }
  }
  return stream;
}

void NoiseSpec::Validate() const {
  for (double v : {depth_sigma, pose_sigma, pixel_sigma, rotation_sigma, accel_sigma}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidConfig, "noise sigmas must be finite and non-negative");
    }
  }
  if (!(occlusion_probability >= 0.0 && occlusion_probability <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "occlusion probability must lie in [0, 1]");
  }
}

namespace {

enum Stream : std::uint64_t { kDepthStream = 1, kPoseStream, kPixelStream, kOcclusionStream,
                              kRotationStream, kAccelStream };

std::mt19937_64 MakeRng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Vec3 GaussianVector(std::mt19937_64& rng, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  const double a = normal(rng);
  const double b = normal(rng);
  const double c = normal(rng);
  return Vec3(a, b, c);
}

}  // namespace

NoisyObservations Corrupt(const std::vector<Pose>& poses, const std::vector<Keypoints>& keypoints,
                          const ImuStream& imu, const Camera& camera, const NoiseSpec& spec,
                          std::uint64_t seed) {
  spec.Validate();
  NoisyObservations out{poses, keypoints, imu};

  if (spec.depth_sigma > 0.0) {
    std::mt19937_64 rng = MakeRng(seed, kDepthStream);
    std::normal_distribution<double> normal(0.0, spec.depth_sigma);
    const Vec3 center = camera.center();
    std::vector<bool> noisy;
    if (!spec.depth_joints.empty()) {
      for (int j : spec.depth_joints) {
        if (j >= static_cast<int>(noisy.size())) noisy.resize(j + 1, false);
        noisy[j] = true;
      }
    }
    for (Pose& pose : out.poses) {
      for (Eigen::Index j = 0; j < pose.cols(); ++j) {
        if (!spec.depth_joints.empty() && (j >= static_cast<Eigen::Index>(noisy.size()) || !noisy[j])) {
          continue;
        }
        const Vec3 ray = (pose.col(j) - center).normalized();
        pose.col(j) += normal(rng) * ray;
      }
    }
  }
  if (spec.pose_sigma > 0.0) {
    std::mt19937_64 rng = MakeRng(seed, kPoseStream);
    for (Pose& pose : out.poses) {
      for (Eigen::Index j = 0; j < pose.cols(); ++j) pose.col(j) += GaussianVector(rng, spec.pose_sigma);
    }
  }
  if (spec.pixel_sigma > 0.0) {
    std::mt19937_64 rng = MakeRng(seed, kPixelStream);
    std::normal_distribution<double> normal(0.0, spec.pixel_sigma);
    for (Keypoints& kp : out.keypoints) {
      for (Eigen::Index j = 0; j < kp.cols(); ++j) {
        const double du = normal(rng);
        const double dv = normal(rng);
        kp(0, j) += du;
        kp(1, j) += dv;
      }
    }
  }
  if (spec.occlusion_probability > 0.0) {
    std::mt19937_64 rng = MakeRng(seed, kOcclusionStream);
    std::bernoulli_distribution occluded(spec.occlusion_probability);
    for (Keypoints& kp : out.keypoints) {
      for (Eigen::Index j = 0; j < kp.cols(); ++j) {
        if (occluded(rng)) kp.col(j).setConstant(std::numeric_limits<double>::quiet_NaN());
      }
    }
  }
  if (spec.rotation_sigma > 0.0) {
    std::mt19937_64 rng = MakeRng(seed, kRotationStream);
    for (auto& frame : out.imu.frames) {
      for (ImuSample& s : frame) {
        const Vec3 v = GaussianVector(rng, spec.rotation_sigma);
        if (v.norm() > 0.0) s.orientation = s.orientation * Rotationd::FromAxisAngle(v, v.norm());
      }
    }
  }
  if (spec.accel_sigma > 0.0) {
    std::mt19937_64 rng = MakeRng(seed, kAccelStream);
    for (auto& frame : out.imu.frames) {
      for (ImuSample& s : frame) s.acceleration += GaussianVector(rng, spec.accel_sigma);
    }
  }
  return out;
}

NoiseSpec DefaultNoiseSpec(const Skeleton& skel) {
  NoiseSpec spec;
  spec.depth_sigma = 60.0;
  for (const char* name : {"RightForeArm", "RightHand", "LeftForeArm", "LeftHand", "RightLeg",
                           "RightFoot", "LeftLeg", "LeftFoot"}) {
    if (const int j = skel.FindJoint(name); j >= 0) spec.depth_joints.push_back(j);
  }
  spec.pose_sigma = 20.0;
  spec.pixel_sigma = 1.0;
  spec.rotation_sigma = 0.02;
  spec.accel_sigma = 200.0;
  spec.occlusion_probability = 0.02;
  return spec;
}

Camera DefaultCamera(double distance) {
  return Camera::LookAt(Vec3(0.0, 1000.0, distance), Vec3(0.0, 1000.0, 0.0), Vec3::UnitY());
}

Dataset GenerateDataset(const SynthConfig& config) {
  Dataset data{DefaultSkeleton(), {}, DefaultCamera(config.camera_distance), config.fps,
               {}, {}, {}, {}, {}};
  data.calibration = DefaultCalibration(data.skeleton);
  const MotionScript script = DefaultMotionScript(data.skeleton, config.fps, config.duration);
  Truth truth = GenerateTruth(script, data.skeleton);
  data.truth = truth.poses;
  if (config.with_imu) {
    data.truth_imu = DeriveImu(truth.params, data.skeleton, data.calibration, config.fps);
  } else {
    data.calibration.sensors.clear();
    data.truth_imu.fps = config.fps;
    data.truth_imu.frames.assign(truth.poses.size(), {});
  }
  const std::vector<Keypoints> clean = ProjectSequence(data.camera, data.truth);
  NoisyObservations noisy =
      Corrupt(data.truth, clean, data.truth_imu, data.camera, config.noise, config.seed);
  data.lifted = std::move(noisy.poses);
  data.keypoints = std::move(noisy.keypoints);
  data.imu = std::move(noisy.imu);
  return data;
}

}  // namespace vifuse
