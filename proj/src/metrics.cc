#include "vifuse/metrics.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "vifuse/error.h"

namespace vifuse {

namespace {

void CheckShapes(const std::vector<Pose>& pred, const std::vector<Pose>& gt) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kLengthMismatch, "sequences have " + std::to_string(pred.size()) +
                                                " and " + std::to_string(gt.size()) + " frames");
  }
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].cols() != gt[i].cols()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "frame " + std::to_string(i) + " differs in joint count");
    }
  }
}

// Finite-difference stencil over frames [i - 1, i - 1 + size).
const std::vector<double>& Stencil(int order) {
  static const std::vector<double> kPosition = {1.0};
  static const std::vector<double> kSecond = {1.0, -2.0, 1.0};
  static const std::vector<double> kThird = {-1.0, 3.0, -3.0, 1.0};
  return order == 0 ? kPosition : order == 2 ? kSecond : kThird;
}

// Per-joint mean of |D pred - D gt| with D the stencil of the given order.
std::vector<double> PerJointError(const std::vector<Pose>& pred, const std::vector<Pose>& gt,
                                  int order) {
  const int frames = static_cast<int>(pred.size());
  const int joints = frames > 0 ? static_cast<int>(pred.front().cols()) : 0;
  const std::vector<double>& w = Stencil(order);
  const int span = static_cast<int>(w.size());
  std::vector<double> sums(joints, 0.0);
  int count = 0;
  for (int i = 1; i - 1 + span <= frames; ++i) {
    Eigen::Matrix3Xd diff = Eigen::Matrix3Xd::Zero(3, joints);
    for (int s = 0; s < span; ++s) {
      if (w[s] != 0.0) diff += w[s] * (pred[i - 1 + s] - gt[i - 1 + s]);
    }
    for (int j = 0; j < joints; ++j) sums[j] += diff.col(j).norm();
    ++count;
  }
  for (double& s : sums) s = count > 0 ? s / count : 0.0;
  return sums;
}

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

}  // namespace

double Mpjpe(const std::vector<Pose>& pred, const std::vector<Pose>& gt) {
  CheckShapes(pred, gt);
  double sum = 0.0;
  long count = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    sum += (pred[i] - gt[i]).colwise().norm().sum();
    count += pred[i].cols();
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

double Mpjae(const std::vector<Pose>& pred, const std::vector<Pose>& gt, double fps,
             bool per_second) {
  CheckShapes(pred, gt);
  if (pred.size() < 3) throw Error(ErrorCode::kTooShort, "MPJAE needs at least 3 frames");
  return Mean(PerJointError(pred, gt, 2)) * (per_second ? fps * fps : 1.0);
}

double Mpjje(const std::vector<Pose>& pred, const std::vector<Pose>& gt, double fps,
             bool per_second) {
  CheckShapes(pred, gt);
  if (pred.size() < 4) throw Error(ErrorCode::kTooShort, "MPJJE needs at least 4 frames");
  return Mean(PerJointError(pred, gt, 3)) * (per_second ? fps * fps * fps : 1.0);
}

MetricReport Evaluate(const std::vector<Pose>& pred, const std::vector<Pose>& gt, double fps,
                      bool per_second) {
  CheckShapes(pred, gt);
  MetricReport r;
  r.frames = static_cast<int>(pred.size());
  r.per_second = per_second;
  r.mpjpe_per_joint = PerJointError(pred, gt, 0);
  r.mpjpe = Mpjpe(pred, gt);
  const int joints = pred.empty() ? 0 : static_cast<int>(pred.front().cols());
  const double s2 = per_second ? fps * fps : 1.0;
  const double s3 = per_second ? fps * fps * fps : 1.0;
  r.mpjae_per_joint.assign(joints, 0.0);
  r.mpjje_per_joint.assign(joints, 0.0);
  if (pred.size() >= 3) {
    r.mpjae_per_joint = PerJointError(pred, gt, 2);
    for (double& v : r.mpjae_per_joint) v *= s2;
    r.mpjae = Mpjae(pred, gt, fps, per_second);
  }
  if (pred.size() >= 4) {
    r.mpjje_per_joint = PerJointError(pred, gt, 3);
    for (double& v : r.mpjje_per_joint) v *= s3;
    r.mpjje = Mpjje(pred, gt, fps, per_second);
  }
  return r;
}

std::string FormatReport(const MetricReport& report, const std::vector<std::string>& joint_names) {
  std::ostringstream os;
  const char* acc_unit = report.per_second ? "mm/s^2" : "mm/frame^2";
  const char* jit_unit = report.per_second ? "mm/s^3" : "mm/frame^3";
  char line[256];
  std::snprintf(line, sizeof(line), "frames  %d\n", report.frames);
  os << line;
  std::snprintf(line, sizeof(line), "MPJPE   %.4f mm\n", report.mpjpe);
  os << line;
  std::snprintf(line, sizeof(line), "MPJAE   %.4f %s\n", report.mpjae, acc_unit);
  os << line;
  std::snprintf(line, sizeof(line), "MPJJE   %.4f %s\n\n", report.mpjje, jit_unit);
  os << line;
  std::snprintf(line, sizeof(line), "%-16s %12s %14s %14s\n", "joint", "MPJPE", "MPJAE", "MPJJE");
  os << line;
  for (size_t j = 0; j < report.mpjpe_per_joint.size(); ++j) {
    const std::string name = j < joint_names.size() ? joint_names[j] : std::to_string(j);
    std::snprintf(line, sizeof(line), "%-16s %12.4f %14.4f %14.4f\n", name.c_str(),
                  report.mpjpe_per_joint[j], report.mpjae_per_joint[j], report.mpjje_per_joint[j]);
    os << line;
  }
  return os.str();
}

}  // namespace vifuse
