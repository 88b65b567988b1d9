#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "vifuse/camera.h"
#include "vifuse/imu.h"
#include "vifuse/skeleton.h"

namespace vifuse {

// angle(t) = amplitude * sin(2 pi frequency t + phase) about a fixed axis.
// Zero frequency with phase pi/2 gives a constant offset.
struct Sinusoid {
  Vec3 axis = Vec3::UnitX();
  double amplitude = 0.0;  // rad
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

// offset(t) = amplitude * sin(2 pi frequency t + phase), per axis in mm.
struct TranslationSinusoid {
  Vec3 amplitude = Vec3::Zero();
  double frequency = 0.0;
  double phase = 0.0;
};

// Analytic motion: each joint's local rotation is the ordered product of its
// sinusoid rotations, the root moves around `root_origin`.
struct MotionScript {
  double fps = 25.0;
  double duration = 60.0;  // s
  Vec3 root_origin = Vec3::Zero();
  std::vector<TranslationSinusoid> root_motion;
  std::map<int, std::vector<Sinusoid>> joint_motion;

  int num_frames() const;
  MotionParams Evaluate(const Skeleton& skel, double t) const;
};

// Loose walking-in-place motion with arm swing, torso sway and knee flexion.
MotionScript DefaultMotionScript(const Skeleton& skel, double fps = 25.0, double duration = 60.0);

struct Truth {
  std::vector<Pose> poses;
  std::vector<MotionParams> params;
};

Truth GenerateTruth(const MotionScript& script, const Skeleton& skel);

// Raw IMU readings reproducing the truth motion under `calib`: orientations
// invert the orientation calibration exactly; accelerometer readings hold the
// fps^2-scaled second difference of the bound joint plus gravity, expressed
// in the sensor frame. The first and last frames reuse their neighbour's
// acceleration.
ImuStream DeriveImu(const std::vector<MotionParams>& params, const Skeleton& skel,
                    const CalibrationSet& calib, double fps);

struct NoiseSpec {
  double depth_sigma = 0.0;        // mm, along the camera ray
  std::vector<int> depth_joints;   // joints receiving depth noise; empty = all
  double pose_sigma = 0.0;         // mm, isotropic
  double pixel_sigma = 0.0;        // px
  double rotation_sigma = 0.0;     // rad, random rotation vector per reading
  double accel_sigma = 0.0;        // mm/s^2
  double occlusion_probability = 0.0;

  void Validate() const;
};

struct NoisyObservations {
  std::vector<Pose> poses;
  std::vector<Keypoints> keypoints;
  ImuStream imu;
};

// Deterministic for a given seed. Each modality draws from its own stream, so
// switching one noise source on or off leaves the others unchanged. Zero
// sigmas pass values through untouched.
NoisyObservations Corrupt(const std::vector<Pose>& poses, const std::vector<Keypoints>& keypoints,
                          const ImuStream& imu, const Camera& camera, const NoiseSpec& spec,
                          std::uint64_t seed);

struct SynthConfig {
  double fps = 25.0;
  double duration = 60.0;
  double camera_distance = 4000.0;  // mm
  NoiseSpec noise;
  bool with_imu = true;
  std::uint64_t seed = 1;
};

// Shipped noise levels of the default dataset.
NoiseSpec DefaultNoiseSpec(const Skeleton& skel);

struct Dataset {
  Skeleton skeleton;
  CalibrationSet calibration;
  Camera camera;
  double fps = 25.0;
  std::vector<Pose> truth;
  ImuStream truth_imu;
  std::vector<Pose> lifted;
  std::vector<Keypoints> keypoints;
  ImuStream imu;  // empty frames when generated without IMUs
};

Camera DefaultCamera(double distance);

Dataset GenerateDataset(const SynthConfig& config);

}  // namespace vifuse
