#pragma once

#include <string>
#include <vector>

#include "vifuse/skeleton.h"

namespace vifuse {

// Mean per joint position error (mm), no alignment.
double Mpjpe(const std::vector<Pose>& pred, const std::vector<Pose>& gt);

// Mean per joint acceleration error: mean norm of the difference of central
// second differences over interior frames. Scaled by fps^2 when
// `per_second`, otherwise in mm/frame^2.
double Mpjae(const std::vector<Pose>& pred, const std::vector<Pose>& gt, double fps,
             bool per_second = true);

// Mean per joint jitter error from third differences
// X[i+2] - 3 X[i+1] + 3 X[i] - X[i-1], scaled by fps^3 when `per_second`.
double Mpjje(const std::vector<Pose>& pred, const std::vector<Pose>& gt, double fps,
             bool per_second = true);

struct MetricReport {
  int frames = 0;
  bool per_second = true;
  double mpjpe = 0.0;
  double mpjae = 0.0;
  double mpjje = 0.0;
  std::vector<double> mpjpe_per_joint;
  std::vector<double> mpjae_per_joint;
  std::vector<double> mpjje_per_joint;
};

// Full report. Acceleration and jitter entries stay zero for sequences too
// short to difference.
MetricReport Evaluate(const std::vector<Pose>& pred, const std::vector<Pose>& gt, double fps,
                      bool per_second = true);

// Human-readable table, one joint per row.
std::string FormatReport(const MetricReport& report, const std::vector<std::string>& joint_names);

}  // namespace vifuse
