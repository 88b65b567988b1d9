#pragma once

#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "vifuse/camera.h"
#include "vifuse/skeleton.h"

namespace vifuse {

// Term weights and fragment settings of the hybrid energy
//   E = k_V E_V / s_V + k_I (k_A E_A / s_A + k_B E_B / s_B + k_S E_S / s_S).
struct EnergyConfig {
  double k_visual = 0.9;
  double k_inertial = 0.1;
  double k_acceleration = 0.5;
  double k_bone = 0.2;
  double k_smooth = 0.3;
  double theta_t = 15.0 * std::numbers::pi / 180.0;  // IGIK threshold (rad)
  int fragment_length = 50;

  void Validate() const;
};

// N consecutive poses flattened into the decision vector, laid out frame
// major: x[(i * J + j) * 3 + c].
struct Fragment {
  int num_frames = 0;
  int num_joints = 0;
  double fps = 25.0;
  int start = 0;  // first frame in the padded sequence
  Eigen::VectorXd positions;

  static Fragment FromPoses(const std::vector<Pose>& poses, double fps, int start = 0);
  std::vector<Pose> ToPoses() const;

  Eigen::Map<const Eigen::Matrix3Xd> frame(int i) const {
    return {positions.data() + 3 * i * num_joints, 3, num_joints};
  }
  Eigen::Map<Eigen::Matrix3Xd> frame(int i) {
    return {positions.data() + 3 * i * num_joints, 3, num_joints};
  }
};

// IMU-derived signals of one sensor over a fragment: gravity-free global
// acceleration and global bone vector of the bound joint, one column per
// frame. NaN columns mark missing samples.
struct InertialTrack {
  int joint = -1;
  int parent = -1;
  Eigen::Matrix3Xd acceleration;
  Eigen::Matrix3Xd bone;
};

struct Observations {
  Matrix34d projection = Matrix34d::Zero();
  std::vector<Keypoints> keypoints;  // one per frame; may be empty when unused
  std::vector<InertialTrack> inertial;
};

struct TermValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
  int skipped = 0;  // residuals dropped (behind camera)
};

// Sum of squared reprojection errors over observed joints.
TermValue VisualEnergy(const Fragment& frag, const Observations& obs);

// Second differences scaled by fps^2 against IMU accelerations, interior
// frames only.
TermValue AccelerationEnergy(const Fragment& frag, const Observations& obs);

// Bound-joint bone vectors against IMU bone vectors.
TermValue BoneEnergy(const Fragment& frag, const Observations& obs);

// First differences of acceleration (fps^3 third differences of position)
// against first differences of IMU acceleration. Needs N >= 4.
TermValue SmoothEnergy(const Fragment& frag, const Observations& obs);

// Per-term normalizers: each term's value at the fragment's initial point,
// floored at 1e-9.
struct NormalizationScales {
  double visual = 1.0;
  double acceleration = 1.0;
  double bone = 1.0;
  double smooth = 1.0;
};

inline constexpr double kMinNormalizationScale = 1e-9;

NormalizationScales ComputeScales(const Fragment& initial, const Observations& obs,
                                  const EnergyConfig& cfg);

TermValue TotalEnergy(const Fragment& frag, const Observations& obs, const EnergyConfig& cfg,
                      const NormalizationScales& scales);

// Value-and-gradient functor over the raw decision vector, the form the
// quasi-Newton solver consumes.
class FragmentObjective {
 public:
  FragmentObjective(const Fragment& layout, const Observations& obs, const EnergyConfig& cfg,
                    const NormalizationScales& scales);

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const;

 private:
  Fragment layout_;
  const Observations& obs_;
  EnergyConfig cfg_;
  NormalizationScales scales_;
};

}  // namespace vifuse
