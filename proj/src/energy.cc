#include "vifuse/energy.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "vifuse/error.h"

namespace vifuse {

void EnergyConfig::Validate() const {
  for (double w : {k_visual, k_inertial, k_acceleration, k_bone, k_smooth}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidConfig, "energy weights must be finite and non-negative");
    }
  }
  if (!(theta_t >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "theta_t must be non-negative");
  }
  if (fragment_length < 4 || fragment_length % 2 != 0) {
    throw Error(ErrorCode::kInvalidFragmentLength,
                "fragment length must be even and >= 4, got " + std::to_string(fragment_length));
  }
}

Fragment Fragment::FromPoses(const std::vector<Pose>& poses, double fps, int start) {
  Fragment frag;
  frag.num_frames = static_cast<int>(poses.size());
  frag.num_joints = poses.empty() ? 0 : static_cast<int>(poses.front().cols());
  frag.fps = fps;
  frag.start = start;
  frag.positions.resize(3 * frag.num_frames * frag.num_joints);
  for (int i = 0; i < frag.num_frames; ++i) {
    if (poses[i].cols() != frag.num_joints) {
      throw Error(ErrorCode::kTopologyMismatch, "fragment poses differ in joint count");
    }
    frag.frame(i) = poses[i];
  }
  return frag;
}

std::vector<Pose> Fragment::ToPoses() const {
  std::vector<Pose> poses;
  poses.reserve(num_frames);
  for (int i = 0; i < num_frames; ++i) poses.emplace_back(frame(i));
  return poses;
}

namespace {

struct Layout {
  int frames;
  int joints;
  double fps;

  Eigen::Index Offset(int i, int j) const { return 3 * (static_cast<Eigen::Index>(i) * joints + j); }
};

using ConstVec = Eigen::Ref<const Eigen::VectorXd>;

Vec3 At(const Layout& l, const ConstVec& x, int i, int j) { return x.segment<3>(l.Offset(i, j)); }

void CheckInertial(const Layout& l, const Observations& obs) {
  for (const InertialTrack& t : obs.inertial) {
    if (t.joint <= 0 || t.joint >= l.joints || t.parent < 0 || t.parent >= t.joint) {
      throw Error(ErrorCode::kUnboundJoint, "inertial track bound to invalid joint");
    }
    if (t.acceleration.cols() != l.frames || t.bone.cols() != l.frames) {
      throw Error(ErrorCode::kLengthMismatch, "inertial track length differs from fragment");
    }
  }
}

// Each accumulator adds weight * d(term)/dx into `grad` and returns the raw
// term value. Pass a null gradient to evaluate the value alone.

double AccumVisual(const Layout& l, const ConstVec& x, const Observations& obs, double weight,
                   Eigen::VectorXd* grad, int* skipped) {
  if (static_cast<int>(obs.keypoints.size()) != l.frames) {
    throw Error(ErrorCode::kLengthMismatch, "keypoint frames differ from fragment length");
  }
  const Eigen::Matrix3d m = obs.projection.leftCols<3>();
  const Vec3 p4 = obs.projection.col(3);
  double value = 0.0;
  for (int i = 0; i < l.frames; ++i) {
    const Keypoints& kp = obs.keypoints[i];
    if (kp.cols() != l.joints) {
      throw Error(ErrorCode::kTopologyMismatch, "keypoint joint count differs from fragment");
    }
    for (int j = 0; j < l.joints; ++j) {
      const Eigen::Vector2d target = kp.col(j);
      if (!target.allFinite()) continue;
      const Vec3 h = m * At(l, x, i, j) + p4;
      if (!(h.z() > kMinProjectiveDepth)) {
        if (skipped != nullptr) ++*skipped;
        continue;
      }
      const Eigen::Vector2d u = h.head<2>() / h.z();
      const Eigen::Vector2d r = u - target;
      value += r.squaredNorm();
      if (grad != nullptr) {
        // du/dX = (M.row(0..1) - u * M.row(2)) / h_z
        Eigen::Matrix<double, 2, 3> jac = m.topRows<2>() - u * m.row(2);
        jac /= h.z();
        grad->segment<3>(l.Offset(i, j)) += weight * 2.0 * jac.transpose() * r;
      }
    }
  }
  return value;
}

Vec3 SecondDifference(const Layout& l, const ConstVec& x, int i, int j) {
  return (At(l, x, i + 1, j) - 2.0 * At(l, x, i, j) + At(l, x, i - 1, j)) * (l.fps * l.fps);
}

double AccumAcceleration(const Layout& l, const ConstVec& x, const Observations& obs,
                         double weight, Eigen::VectorXd* grad) {
  if (l.frames < 3) {
    throw Error(ErrorCode::kTooShort, "acceleration term needs at least 3 frames");
  }
  CheckInertial(l, obs);
  const double fps2 = l.fps * l.fps;
  double value = 0.0;
  for (const InertialTrack& t : obs.inertial) {
    for (int i = 1; i + 1 < l.frames; ++i) {
      const Vec3 a_imu = t.acceleration.col(i);
      if (!a_imu.allFinite()) continue;
      const Vec3 r = SecondDifference(l, x, i, t.joint) - a_imu;
      value += r.squaredNorm();
      if (grad != nullptr) {
        const Vec3 g = weight * 2.0 * fps2 * r;
        grad->segment<3>(l.Offset(i + 1, t.joint)) += g;
        grad->segment<3>(l.Offset(i, t.joint)) -= 2.0 * g;
        grad->segment<3>(l.Offset(i - 1, t.joint)) += g;
      }
    }
  }
  return value;
}

double AccumBone(const Layout& l, const ConstVec& x, const Observations& obs, double weight,
                 Eigen::VectorXd* grad) {
  CheckInertial(l, obs);
  double value = 0.0;
  for (const InertialTrack& t : obs.inertial) {
    for (int i = 0; i < l.frames; ++i) {
      const Vec3 b_imu = t.bone.col(i);
      if (!b_imu.allFinite()) continue;
      const Vec3 r = At(l, x, i, t.joint) - At(l, x, i, t.parent) - b_imu;
      value += r.squaredNorm();
      if (grad != nullptr) {
        const Vec3 g = weight * 2.0 * r;
        grad->segment<3>(l.Offset(i, t.joint)) += g;
        grad->segment<3>(l.Offset(i, t.parent)) -= g;
      }
    }
  }
  return value;
}

double AccumSmooth(const Layout& l, const ConstVec& x, const Observations& obs, double weight,
                   Eigen::VectorXd* grad) {
  if (l.frames < 4) {
    throw Error(ErrorCode::kTooShort, "smooth term needs at least 4 frames");
  }
  CheckInertial(l, obs);
  const double fps3 = l.fps * l.fps * l.fps;
  double value = 0.0;
  for (const InertialTrack& t : obs.inertial) {
    // S_i = (A_{i+1} - A_i) * fps, both accelerations interior.
    for (int i = 1; i + 2 < l.frames; ++i) {
      const Vec3 a0 = t.acceleration.col(i);
      const Vec3 a1 = t.acceleration.col(i + 1);
      if (!a0.allFinite() || !a1.allFinite()) continue;
      const Vec3 s_imu = (a1 - a0) * l.fps;
      const Vec3 s_frag = (At(l, x, i + 2, t.joint) - 3.0 * At(l, x, i + 1, t.joint) +
                           3.0 * At(l, x, i, t.joint) - At(l, x, i - 1, t.joint)) *
                          fps3;
      const Vec3 r = s_frag - s_imu;
      value += r.squaredNorm();
      if (grad != nullptr) {
        const Vec3 g = weight * 2.0 * fps3 * r;
        grad->segment<3>(l.Offset(i + 2, t.joint)) += g;
        grad->segment<3>(l.Offset(i + 1, t.joint)) -= 3.0 * g;
        grad->segment<3>(l.Offset(i, t.joint)) += 3.0 * g;
        grad->segment<3>(l.Offset(i - 1, t.joint)) -= g;
      }
    }
  }
  return value;
}

Layout LayoutOf(const Fragment& frag) {
  if (frag.positions.size() != 3 * static_cast<Eigen::Index>(frag.num_frames) * frag.num_joints) {
    throw Error(ErrorCode::kTopologyMismatch, "fragment decision vector has the wrong size");
  }
  if (!frag.positions.allFinite()) {
    throw Error(ErrorCode::kInvalidConfig, "fragment contains non-finite positions");
  }
  return {frag.num_frames, frag.num_joints, frag.fps};
}

TermValue MakeTerm(const Fragment& frag) {
  TermValue t;
  t.gradient = Eigen::VectorXd::Zero(frag.positions.size());
  return t;
}

double EvaluateTotal(const Layout& l, const ConstVec& x, const Observations& obs,
                     const EnergyConfig& cfg, const NormalizationScales& s,
                     Eigen::VectorXd* grad, int* skipped) {
  const double w_visual = cfg.k_visual / s.visual;
  const double w_accel = cfg.k_inertial * cfg.k_acceleration / s.acceleration;
  const double w_bone = cfg.k_inertial * cfg.k_bone / s.bone;
  const double w_smooth = cfg.k_inertial * cfg.k_smooth / s.smooth;
  double visual = 0.0;
  double accel = 0.0;
  double bone = 0.0;
  double smooth = 0.0;
  if (w_visual > 0.0) visual = AccumVisual(l, x, obs, w_visual, grad, skipped);
  if (w_accel > 0.0) accel = AccumAcceleration(l, x, obs, w_accel, grad);
  if (w_bone > 0.0) bone = AccumBone(l, x, obs, w_bone, grad);
  if (w_smooth > 0.0) smooth = AccumSmooth(l, x, obs, w_smooth, grad);
  double value = cfg.k_visual * (visual / s.visual);
  if (cfg.k_inertial > 0.0) {
    value += cfg.k_inertial * (cfg.k_acceleration * (accel / s.acceleration) +
                               cfg.k_bone * (bone / s.bone) + cfg.k_smooth * (smooth / s.smooth));
  }
  return value;
}

}  // namespace

TermValue VisualEnergy(const Fragment& frag, const Observations& obs) {
  TermValue t = MakeTerm(frag);
  t.value = AccumVisual(LayoutOf(frag), frag.positions, obs, 1.0, &t.gradient, &t.skipped);
  return t;
}

TermValue AccelerationEnergy(const Fragment& frag, const Observations& obs) {
  TermValue t = MakeTerm(frag);
  t.value = AccumAcceleration(LayoutOf(frag), frag.positions, obs, 1.0, &t.gradient);
  return t;
}

TermValue BoneEnergy(const Fragment& frag, const Observations& obs) {
  TermValue t = MakeTerm(frag);
  t.value = AccumBone(LayoutOf(frag), frag.positions, obs, 1.0, &t.gradient);
  return t;
}

TermValue SmoothEnergy(const Fragment& frag, const Observations& obs) {
  TermValue t = MakeTerm(frag);
  t.value = AccumSmooth(LayoutOf(frag), frag.positions, obs, 1.0, &t.gradient);
  return t;
}

NormalizationScales ComputeScales(const Fragment& initial, const Observations& obs,
                                  const EnergyConfig& cfg) {
  const Layout l = LayoutOf(initial);
  const ConstVec x = initial.positions;
  NormalizationScales s;
  auto floor = [](double v) { return std::max(v, kMinNormalizationScale); };
  if (cfg.k_visual > 0.0) s.visual = floor(AccumVisual(l, x, obs, 0.0, nullptr, nullptr));
  if (cfg.k_inertial > 0.0) {
    if (cfg.k_acceleration > 0.0) s.acceleration = floor(AccumAcceleration(l, x, obs, 0.0, nullptr));
    if (cfg.k_bone > 0.0) s.bone = floor(AccumBone(l, x, obs, 0.0, nullptr));
    if (cfg.k_smooth > 0.0) s.smooth = floor(AccumSmooth(l, x, obs, 0.0, nullptr));
  }
  return s;
}

TermValue TotalEnergy(const Fragment& frag, const Observations& obs, const EnergyConfig& cfg,
                      const NormalizationScales& scales) {
  TermValue t = MakeTerm(frag);
  t.value = EvaluateTotal(LayoutOf(frag), frag.positions, obs, cfg, scales, &t.gradient,
                          &t.skipped);
  return t;
}

FragmentObjective::FragmentObjective(const Fragment& layout, const Observations& obs,
                                     const EnergyConfig& cfg, const NormalizationScales& scales)
    : obs_(obs), cfg_(cfg), scales_(scales) {
  layout_.num_frames = layout.num_frames;
  layout_.num_joints = layout.num_joints;
  layout_.fps = layout.fps;
  layout_.start = layout.start;
}

double FragmentObjective::operator()(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const {
  const Layout l{layout_.num_frames, layout_.num_joints, layout_.fps};
  if (gradient != nullptr) gradient->setZero(x.size());
  return EvaluateTotal(l, x, obs_, cfg_, scales_, gradient, nullptr);
}

}  // namespace vifuse
