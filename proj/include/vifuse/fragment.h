#pragma once

#include <array>
#include <deque>
#include <utility>
#include <vector>

#include "vifuse/energy.h"
#include "vifuse/lbfgs.h"

namespace vifuse {

// Half-overlapping crop windows over a sequence padded with replicas of its
// boundary frames. With stride h = N/2 the padded sequence has h replicas of
// the first frame in front and at least h replicas of the last frame behind,
// and every original frame lies in exactly two windows.
class FragmentSchedule {
 public:
  struct Window {
    int start;  // padded index, inclusive
    int end;    // padded index, exclusive
  };

  static FragmentSchedule Build(int num_frames, int fragment_length);

  int num_frames() const { return num_frames_; }
  int fragment_length() const { return fragment_length_; }
  int stride() const { return fragment_length_ / 2; }
  int padded_length() const { return padded_length_; }
  const std::vector<Window>& windows() const { return windows_; }

  // Original frame a padded slot replicates.
  int SourceFrame(int padded) const;
  bool IsPadding(int padded) const;
  int ToPadded(int frame) const { return frame + stride(); }

  // The two windows containing an original frame, earlier window first.
  std::array<int, 2> CoveringWindows(int frame) const;

 private:
  int num_frames_ = 0;
  int fragment_length_ = 0;
  int padded_length_ = 0;
  std::vector<Window> windows_;
};

// Observation signals of one frame. IMU columns follow the sensor order of
// the owning SequenceInput.
struct FrameInput {
  Pose pose;                          // initial estimate (baseline or SF2 output)
  Keypoints keypoints;                // empty when the visual term is unused
  Eigen::Matrix3Xd imu_acceleration;  // gravity-free global, one column per sensor
  Eigen::Matrix3Xd imu_bone;          // global bone vector, one column per sensor
};

struct SensorBinding {
  int joint = -1;
  int parent = -1;
};

struct SequenceInput {
  double fps = 25.0;
  Matrix34d projection = Matrix34d::Zero();
  std::vector<SensorBinding> sensors;
  std::vector<FrameInput> frames;
};

// Fragment and observations for the window starting at padded index `start`.
// IMU accelerations of padding slots are marked missing since replicated
// frames carry no motion.
std::pair<Fragment, Observations> BuildWindowProblem(
    int start, double fps, const Matrix34d& projection, const std::vector<SensorBinding>& sensors,
    const std::vector<const FrameInput*>& window_frames, const std::vector<bool>& padding);

struct FragmentResult {
  Fragment fragment;
  SolverSummary summary;
  bool line_search_failed = false;
};

FragmentResult MinimizeFragment(const Fragment& initial, const Observations& obs,
                                const EnergyConfig& cfg, const SolverSettings& settings);

// Per-frame mean of the two optimized copies of every original frame.
std::vector<Pose> MergeFragments(const FragmentSchedule& schedule,
                                 const std::vector<Fragment>& optimized);

struct RefineStats {
  int fragments = 0;
  int line_search_failures = 0;
  double solver_seconds = 0.0;  // summed over fragments
  double wall_seconds = 0.0;

  double fragments_per_second() const;
  double frames_per_second(int frames) const;
};

struct RefineResult {
  std::vector<Pose> poses;
  RefineStats stats;
};

// Whole-sequence refinement: crop, optimize every window (on `threads`
// workers), merge.
RefineResult RefineSequence(const SequenceInput& input, const EnergyConfig& cfg,
                            const SolverSettings& settings, int threads = 1);

// Incremental refinement. Frames go in one at a time; a refined frame comes
// out as soon as both windows covering it are optimized. The output matches
// RefineSequence bit for bit.
class StreamingRefiner {
 public:
  StreamingRefiner(double fps, const Matrix34d& projection, std::vector<SensorBinding> sensors,
                   const EnergyConfig& cfg, const SolverSettings& settings);

  // Returns the frames that became final with this push.
  std::vector<Pose> Push(FrameInput frame);

  // Pads the tail and flushes every remaining frame.
  std::vector<Pose> Finish();

  const RefineStats& stats() const { return stats_; }
  int frames_pushed() const { return frames_pushed_; }

 private:
  const FrameInput& Slot(int padded) const;
  void RunWindow(int w, std::vector<Pose>* out);

  double fps_;
  Matrix34d projection_;
  std::vector<SensorBinding> sensors_;
  EnergyConfig cfg_;
  SolverSettings settings_;
  int stride_;

  std::deque<FrameInput> frames_;  // original frames from index frames_base_
  int frames_base_ = 0;
  int frames_pushed_ = 0;
  int next_window_ = 0;
  bool finished_ = false;
  std::vector<Pose> previous_copy_;  // window w-1's second half
  RefineStats stats_;
};

}  // namespace vifuse
