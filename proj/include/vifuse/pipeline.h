#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vifuse/camera.h"
#include "vifuse/energy.h"
#include "vifuse/fragment.h"
#include "vifuse/imu.h"
#include "vifuse/lbfgs.h"
#include "vifuse/skeleton.h"

namespace vifuse {

// baseline: input poses unchanged. sf2: per-frame IGIK. rto: fragment
// optimization with the visual term only. rtof: sf2 followed by the full
// visual-inertial optimization.
enum class Mode { kBaseline, kRto, kSf2, kRtof };

Mode ParseMode(const std::string& name);
const char* ModeName(Mode mode);

struct PipelineInputs {
  Skeleton skeleton = DefaultSkeleton();
  double fps = 25.0;
  std::vector<Pose> poses;                 // lifted 3D poses
  std::vector<Keypoints> keypoints;        // empty when absent
  std::optional<Camera> camera;
  std::optional<CalibrationSet> calibration;
  std::optional<ImuStream> imu;
};

struct PipelineOptions {
  EnergyConfig energy;
  SolverSettings solver;
  int threads = 1;
  bool streaming = false;  // feed the optimizer frame by frame
};

struct PipelineResult {
  std::vector<Pose> poses;
  RefineStats stats;
  int replaced_rotations = 0;  // IGIK replacements over all frames
};

// Throws kMissingInput when the mode needs data that is absent.
void ValidateInputs(Mode mode, const PipelineInputs& inputs);

struct FusionResult {
  std::vector<Pose> poses;
  int replaced_rotations = 0;
};

// Per-frame IGIK followed by forward kinematics.
FusionResult SingleFrameFusion(const Skeleton& skel, const CalibrationSet& calib,
                               const std::vector<Pose>& poses, const ImuStream& imu,
                               double theta_t);

// Optimizer input assembled from initial poses, keypoints and calibrated IMU
// signals. Without `imu` the sensor list is empty.
SequenceInput BuildSequenceInput(const Skeleton& skel, double fps, const std::vector<Pose>& poses,
                                 const std::vector<Keypoints>& keypoints, const Camera& camera,
                                 const CalibrationSet* calib, const ImuStream* imu);

PipelineResult RunPipeline(Mode mode, const PipelineInputs& inputs, const PipelineOptions& options);

}  // namespace vifuse
