#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vifuse/camera.h"
#include "vifuse/imu.h"
#include "vifuse/metrics.h"
#include "vifuse/pipeline.h"
#include "vifuse/skeleton.h"
#include "vifuse/synth.h"

namespace vifuse::io {

// Text formats, one record per line, single-space separated, floats at 9
// significant digits. Every file opens with a header
//   #format <schema> <version> [key value]...
// and a version other than kFormatVersion is rejected.
//
//   pose3d       frame x0 y0 z0 x1 y1 z1 ...          header keys: frames joints fps
//   pose2d       frame u0 v0 u1 v1 ... ("nan nan" = occluded)
//   imu          frame sensor qw qx qy qz ax ay az    header keys: frames sensors fps
//   skeleton     joint <name> <parent or -> x y z
//   calibration  gravity x y z
//                sensor <id> <joint> <R_kg: qw qx qy qz> <R_kj: qw qx qy qz>
//   camera       intrinsics fx fy cx cy / rotation qw qx qy qz / translation x y z
//
// IMU accelerations are raw accelerometer output in the sensor frame: a
// stationary sensor, rotated into the global frame, reads the calibration's
// gravity vector.
inline constexpr int kFormatVersion = 1;

struct PoseStream {
  double fps = 25.0;
  std::vector<Pose> poses;
};

struct KeypointStream {
  double fps = 25.0;
  std::vector<Keypoints> keypoints;
};

void WritePose3d(std::ostream& os, const std::vector<Pose>& poses, double fps);
PoseStream ReadPose3d(std::istream& is);

void WritePose2d(std::ostream& os, const std::vector<Keypoints>& keypoints, double fps);
KeypointStream ReadPose2d(std::istream& is);

void WriteImu(std::ostream& os, const ImuStream& imu);
ImuStream ReadImu(std::istream& is);

void WriteSkeleton(std::ostream& os, const Skeleton& skel);
Skeleton ReadSkeleton(std::istream& is);

void WriteCalibration(std::ostream& os, const CalibrationSet& calib, const Skeleton& skel);
CalibrationSet ReadCalibration(std::istream& is, const Skeleton& skel);

void WriteCamera(std::ostream& os, const Camera& camera);
Camera ReadCamera(std::istream& is);

// File wrappers; errors name the path.
template <typename T, typename Reader>
T ReadFile(const std::filesystem::path& path, Reader reader) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return reader(is);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

void WriteFile(const std::filesystem::path& path, const std::string& contents);
std::string ReadText(const std::filesystem::path& path);

// Dataset directory layout.
struct DatasetFiles {
  static constexpr const char* kSkeleton = "skeleton.txt";
  static constexpr const char* kCalibration = "calibration.txt";
  static constexpr const char* kCamera = "camera.txt";
  static constexpr const char* kTruth = "truth.pose3d";
  static constexpr const char* kLifted = "lifted.pose3d";
  static constexpr const char* kKeypoints = "keypoints.pose2d";
  static constexpr const char* kImu = "imu.imu";
  static constexpr const char* kTruthImu = "truth.imu";
  static constexpr const char* kManifest = "manifest.json";
};

SynthConfig ParseSynthConfig(const std::string& json_text);

// Writes every stream plus a manifest recording the seed and noise.
void WriteDataset(const std::filesystem::path& dir, const Dataset& data, const SynthConfig& config);

struct RunConfig {
  Mode mode = Mode::kRtof;
  std::filesystem::path dataset;  // base for relative and default input paths
  std::optional<std::filesystem::path> skeleton;
  std::optional<std::filesystem::path> calibration;
  std::optional<std::filesystem::path> camera;
  std::optional<std::filesystem::path> poses;
  std::optional<std::filesystem::path> keypoints;
  std::optional<std::filesystem::path> imu;
  std::optional<std::filesystem::path> truth;
  PipelineOptions options;
  bool per_second_metrics = true;
  std::uint64_t seed = 1;
};

// JSON run configuration. Relative paths resolve against `base_dir`.
RunConfig ParseRunConfig(const std::string& json_text, const std::filesystem::path& base_dir);

struct LoadedRun {
  PipelineInputs inputs;
  std::optional<std::vector<Pose>> truth;
};

// Resolves each input (explicit path, else the dataset default when the file
// exists) and loads it.
LoadedRun LoadRun(const RunConfig& config);

std::string ReportJson(const MetricReport& report, const RunConfig& config,
                       const std::vector<std::string>& joint_names);

}  // namespace vifuse::io
