// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.h"
#include "vifuse/energy.h"
#include "vifuse/fragment.h"
#include "vifuse/imu.h"
#include "vifuse/metrics.h"
#include "vifuse/pipeline.h"
#include "vifuse/skeleton.h"
#include "vifuse/synth.h"

namespace {

using namespace vifuse;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

Dataset MakeDataset(const NoiseSpec& noise, bool with_imu, double duration = 60.0) {
  SynthConfig cfg;
  cfg.duration = duration;
  cfg.noise = noise;
  cfg.with_imu = with_imu;
  return GenerateDataset(cfg);
}

PipelineInputs Inputs(const Dataset& d) {
  PipelineInputs in;
  in.skeleton = d.skeleton;
  in.fps = d.fps;
  in.poses = d.lifted;
  in.keypoints = d.keypoints;
  in.camera = d.camera;
  if (!d.calibration.sensors.empty()) {
    in.calibration = d.calibration;
    in.imu = d.imu;
  }
  return in;
}

std::vector<Pose> Run(Mode mode, const Dataset& d, const PipelineOptions& opts = {}) {
  return RunPipeline(mode, Inputs(d), opts).poses;
}

double Mpjje25(const std::vector<Pose>& pred, const Dataset& d) { return Mpjje(pred, d.truth, d.fps); }

// ---------------------------------------------------------------------------

Outcome GradientOracle() {
  std::mt19937_64 rng(2024);
  using Term = std::function<TermValue(const Fragment&, const Observations&)>;
  const char* names[] = {"E_V", "E_A", "E_B", "E_S", "total"};
  double worst[5] = {0, 0, 0, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const testing::Problem p = testing::RandomProblem(rng, 8, 5);
    EnergyConfig cfg;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    cfg.k_visual = u(rng);
    cfg.k_inertial = u(rng);
    cfg.k_acceleration = u(rng);
    cfg.k_bone = u(rng);
    cfg.k_smooth = u(rng);
    const NormalizationScales scales = ComputeScales(p.fragment, p.obs, cfg);
    const Term terms[] = {
        VisualEnergy, AccelerationEnergy, BoneEnergy, SmoothEnergy,
        [&](const Fragment& f, const Observations& o) { return TotalEnergy(f, o, cfg, scales); }};
    for (int t = 0; t < 5; ++t) {
      const TermValue analytic = terms[t](p.fragment, p.obs);
      Fragment probe = p.fragment;
      const Eigen::VectorXd numeric = testing::NumericGradient(
          [&](const Eigen::VectorXd& x) {
            probe.positions = x;
            return terms[t](probe, p.obs).value;
          },
          p.fragment.positions, 1e-3);
      worst[t] = std::max(worst[t], testing::RelativeError(analytic.gradient, numeric));
    }
  }
  Outcome o;
  o.pass = true;
  for (int t = 0; t < 5; ++t) {
    o.pass = o.pass && worst[t] < 1e-5;
    o.detail += Format("%s %.1e ", names[t], worst[t]);
  }
  o.detail += "(max relative error, limit 1e-5)";
  return o;
}

Outcome KinematicRoundTrip() {
  const Skeleton skel = DefaultSkeleton();
  std::mt19937_64 rng(7);
  double worst_pos = 0.0;
  double worst_len = 0.0;
  auto lengths = [&](const Pose& x) {
    for (int j = 1; j < skel.num_joints(); ++j) {
      const double ref = skel.tpose_bone(j).norm();
      worst_len = std::max(worst_len, std::abs((x.col(j) - x.col(skel.parent(j))).norm() - ref) / ref);
    }
  };
  for (int i = 0; i < 1000; ++i) {
    const Pose x = ForwardKinematics(skel, testing::RandomParams(skel, rng));
    const Pose y = ForwardKinematics(skel, InverseKinematics(skel, x));
    worst_pos = std::max(worst_pos, (x - y).colwise().norm().maxCoeff());
    lengths(x);
    lengths(y);
  }
  return {worst_pos < 1e-6 && worst_len < 1e-9,
          Format("max FK(IK(FK)) deviation %.2e mm (limit 1e-6), max bone length error %.2e "
                 "relative (limit 1e-9)",
                 worst_pos, worst_len)};
}

Outcome CalibrationRoundTrip() {
  std::mt19937_64 rng(11);
  // Orientations: default motion, random calibrations.
  const Skeleton skel = DefaultSkeleton();
  const Truth truth = GenerateTruth(DefaultMotionScript(skel, 25.0, 20.0), skel);
  double worst_rot = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    CalibrationSet calib = DefaultCalibration(skel);
    for (auto& [k, s] : calib.sensors) {
      s.ref_to_global = testing::RandomRotation(rng);
      s.ref_to_joint = testing::RandomRotation(rng);
    }
    const ImuStream imu = DeriveImu(truth.params, skel, calib, 25.0);
    for (size_t i = 0; i < truth.params.size(); ++i) {
      const auto global = GlobalRotations(skel, truth.params[i]);
      for (const ImuSample& s : imu.frames[i]) {
        const Rotationd diff = CalibrateOrientation(calib, s).inverse() *
                               global[calib.sensor(s.sensor).joint];
        worst_rot = std::max(worst_rot, diff.angle());
      }
    }
  }

  // Accelerations: one joint swinging A sin(w t) about z, analytic oracle.
  Pose tpose(3, 3);
  tpose << 0, 0, 300, 1000, 1200, 1200, 0, 0, 0;
  const Skeleton chain({{"root", -1}, {"mid", 0}, {"tip", 1}}, tpose);
  const double amp = 0.6;
  const double freq = 1.3;
  const double w = 2.0 * std::numbers::pi * freq;
  const Vec3 bone = chain.tpose_bone(2);
  const double fourth = bone.norm() * std::pow(w, 4) *
                        (amp + 7 * amp * amp + 6 * std::pow(amp, 3) + std::pow(amp, 4));
  bool within = true;
  std::vector<double> errors;
  for (double fps : {25.0, 50.0, 100.0}) {
    MotionScript script;
    script.fps = fps;
    script.duration = 4.0;
    script.root_origin = chain.tpose().col(0);
    script.joint_motion[2] = {{Vec3::UnitZ(), amp, freq, 0.0}};
    CalibrationSet calib;
    calib.sensors[0] = {2, testing::RandomRotation(rng), testing::RandomRotation(rng)};
    const Truth t = GenerateTruth(script, chain);
    const ImuStream imu = DeriveImu(t.params, chain, calib, fps);
    double err = 0.0;
    for (size_t i = 1; i + 1 < imu.frames.size(); ++i) {
      const double time = i / fps;
      const double th = amp * std::sin(w * time);
      const double d1 = amp * w * std::cos(w * time);
      const double d2 = -amp * w * w * std::sin(w * time);
      const Vec3 z = Vec3::UnitZ();
      const Vec3 rb = Eigen::AngleAxisd(th, z) * bone;
      const Vec3 analytic = d2 * z.cross(rb) + d1 * d1 * z.cross(z.cross(rb));
      err = std::max(err, (CalibrateAcceleration(calib, imu.frames[i][0]) - analytic).norm());
    }
    within = within && err <= fourth / (12.0 * fps * fps);
    errors.push_back(err);
  }
  const double order = std::log2(errors[0] / errors[2]) / 2.0;
  return {worst_rot < 1e-9 && within && order > 1.8,
          Format("rotation error %.1e rad (limit 1e-9); acceleration error %.1f/%.1f/%.1f mm/s^2 "
                 "at 25/50/100 fps, within h^2 bound: %s, observed order %.2f",
                 worst_rot, errors[0], errors[1], errors[2], within ? "yes" : "no", order)};
}

Outcome DepthRepair() {
  const Skeleton skel = DefaultSkeleton();
  NoiseSpec noise;
  noise.depth_sigma = 60.0;
  noise.depth_joints = DefaultNoiseSpec(skel).depth_joints;
  const Dataset d = MakeDataset(noise, true);
  const std::vector<Pose> base = Run(Mode::kBaseline, d);
  const std::vector<Pose> sf2 = Run(Mode::kSf2, d);
  auto child_error = [&](const std::vector<Pose>& pred) {
    double sum = 0.0;
    int count = 0;
    for (const auto& [k, s] : d.calibration.sensors) {
      for (size_t i = 0; i < pred.size(); ++i) {
        sum += (pred[i].col(s.joint) - d.truth[i].col(s.joint)).norm();
        ++count;
      }
    }
    return sum / count;
  };
  const double b = child_error(base);
  const double s = child_error(sf2);
  const double reduction = 1.0 - s / b;
  return {reduction >= 0.40,
          Format("IMU-bone child joints MPJPE baseline %.2f mm, SF2 %.2f mm, reduction %.1f%% "
                 "(floor 40%%)",
                 b, s, 100.0 * reduction)};
}

Outcome JitterRepair() {
  const Dataset d = MakeDataset(DefaultNoiseSpec(DefaultSkeleton()), true);
  const auto base = Run(Mode::kBaseline, d);
  const auto sf2 = Run(Mode::kSf2, d);
  const auto rtof = Run(Mode::kRtof, d);
  const double jb = Mpjje25(base, d);
  const double js = Mpjje25(sf2, d);
  const double jr = Mpjje25(rtof, d);
  const double ps = Mpjpe(sf2, d.truth);
  const double pr = Mpjpe(rtof, d.truth);
  const double reduction = 1.0 - jr / js;
  return {js > jb && reduction >= 0.5 && pr <= ps,
          Format("MPJJE baseline %.0f, SF2 %.0f, RTOF %.0f mm/s^3 (RTOF vs SF2 -%.1f%%, floor "
                 "50%%); MPJPE SF2 %.2f, RTOF %.2f mm",
                 jb, js, jr, 100.0 * reduction, ps, pr)};
}

Outcome RtoSmoothing() {
  const Dataset d = MakeDataset(DefaultNoiseSpec(DefaultSkeleton()), false);
  const auto base = Run(Mode::kBaseline, d);
  const auto rto = Run(Mode::kRto, d);
  const double jb = Mpjje25(base, d);
  const double jr = Mpjje25(rto, d);
  const double pb = Mpjpe(base, d.truth);
  const double pr = Mpjpe(rto, d.truth);
  const double reduction = 1.0 - jr / jb;
  return {reduction >= 0.5 && pr <= 1.05 * pb,
          Format("MPJJE baseline %.0f, RTO %.0f mm/s^3 (-%.1f%%, floor 50%%); MPJPE baseline "
                 "%.2f, RTO %.2f mm (%+.1f%%, ceiling +5%%)",
                 jb, jr, 100.0 * reduction, pb, pr, 100.0 * (pr / pb - 1.0))};
}

Outcome Schedule() {
  bool cover = true;
  for (int n = 4; n <= 64; n += 4) {
    for (int t = 1; t <= 200; ++t) {
      const FragmentSchedule s = FragmentSchedule::Build(t, n);
      for (int f = 0; f < t; ++f) {
        const int p = s.ToPadded(f);
        int count = 0;
        for (const auto& w : s.windows()) count += (p >= w.start && p < w.end) ? 1 : 0;
        cover = cover && count == 2;
      }
    }
  }
  const Dataset d = MakeDataset(DefaultNoiseSpec(DefaultSkeleton()), true, 20.0);
  const FusionResult fused =
      SingleFrameFusion(d.skeleton, d.calibration, d.lifted, d.imu, EnergyConfig().theta_t);
  const SequenceInput seq = BuildSequenceInput(d.skeleton, d.fps, fused.poses, d.keypoints,
                                               d.camera, &d.calibration, &d.imu);
  EnergyConfig cfg;
  cfg.fragment_length = 50;
  const SolverSettings settings;
  const RefineResult batch = RefineSequence(seq, cfg, settings);
  StreamingRefiner stream(seq.fps, seq.projection, seq.sensors, cfg, settings);
  std::vector<Pose> out;
  for (const FrameInput& f : seq.frames) {
    for (Pose& p : stream.Push(f)) out.push_back(std::move(p));
  }
  for (Pose& p : stream.Finish()) out.push_back(std::move(p));
  bool equal = out.size() == batch.poses.size() && out.size() == 500;
  for (size_t i = 0; equal && i < out.size(); ++i) equal = out[i] == batch.poses[i];
  return {cover && equal,
          Format("2-cover over T in [1,200], N in {4..64}: %s; streaming vs batch on %zu frames "
                 "(N=50, %d fragments each): %s",
                 cover ? "exact" : "violated", out.size(), stream.stats().fragments,
                 equal ? "bitwise equal" : "DIFFERENT")};
}

Outcome FragmentLength() {
  const Dataset d = MakeDataset(DefaultNoiseSpec(DefaultSkeleton()), true);
  std::vector<double> fps;
  std::vector<double> jitter;
  std::string detail;
  for (int n : {20, 50, 100, 200}) {
    PipelineOptions opts;
    opts.energy.fragment_length = n;
    const PipelineResult r = RunPipeline(Mode::kRtof, Inputs(d), opts);
    fps.push_back(r.stats.fragments_per_second());
    jitter.push_back(Mpjje25(r.poses, d));
    detail += Format("N=%d: %.1f fragments/s, %.1f frames/s, MPJPE %.2f, MPJJE %.0f; ", n, fps.back(),
                     r.stats.frames_per_second(static_cast<int>(r.poses.size())),
                     Mpjpe(r.poses, d.truth), jitter.back());
  }
  bool decreasing = true;
  for (size_t i = 1; i < fps.size(); ++i) decreasing = decreasing && fps[i] < fps[i - 1];
  return {decreasing && jitter[3] <= jitter[0],
          detail + Format("fragments/s strictly decreasing: %s, MPJJE(200) <= MPJJE(20): %s",
                          decreasing ? "yes" : "no", jitter[3] <= jitter[0] ? "yes" : "no")};
}

Outcome WeightSanity() {
  const Dataset d = MakeDataset(DefaultNoiseSpec(DefaultSkeleton()), true);
  PipelineOptions visual;
  visual.energy.k_inertial = 0.0;
  const double jv = Mpjje25(Run(Mode::kRtof, d, visual), d);
  const double jd = Mpjje25(Run(Mode::kRtof, d), d);
  return {jv > jd, Format("MPJJE with k_I=0: %.0f, with defaults k_V=0.9/k_I=0.1: %.0f mm/s^3", jv, jd)};
}

std::string Slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Outcome Determinism() {
  const fs::path dir = fs::temp_directory_path() / "vifuse_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = VIFUSE_CLI;
  const std::string quiet = " > /dev/null 2>&1";
  bool ok = std::system((cli + " synth --seed 5 --out " + (dir / "data").string() + quiet).c_str()) == 0;
  std::ofstream(dir / "run.json") << R"({"dataset": "data", "seed": 5})";
  for (const char* out : {"a", "b"}) {
    const std::string cmd = cli + " run --mode rtof --seed 5 --config " + (dir / "run.json").string() +
                            " --out " + (dir / out).string() + quiet;
    ok = ok && std::system(cmd.c_str()) == 0;
  }
  int identical = 0;
  for (const char* f : {"output.pose3d", "report.txt", "report.json"}) {
    const std::string a = Slurp(dir / "a" / f);
    if (!a.empty() && a == Slurp(dir / "b" / f)) ++identical;
  }
  fs::remove_all(dir);
  return {ok && identical == 3,
          Format("CLI runs succeeded: %s; byte-identical outputs: %d of 3 (output stream, text "
                 "and JSON reports)",
                 ok ? "yes" : "no", identical)};
}

}  // namespace

int main(int argc, char** argv) {
  // --report-only prints every line but always exits 0.
  const bool report_only = argc > 1 && std::string(argv[1]) == "--report-only";
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "gradient oracle", 30, GradientOracle},
      {2, "kinematic round trip", 10, KinematicRoundTrip},
      {3, "calibration round trip", 10, CalibrationRoundTrip},
      {4, "depth-ambiguity repair", 60, DepthRepair},
      {5, "jitter amplification and repair", 300, JitterRepair},
      {6, "RTO smoothing", 180, RtoSmoothing},
      {7, "fragment schedule", 120, Schedule},
      {8, "fragment-length trade-off", 600, FragmentLength},
      {9, "weight sanity", 180, WeightSanity},
      {10, "determinism", 600, Determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %d (%s): %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, o.detail.c_str(), seconds, c.limit_seconds);
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 || report_only ? 0 : 1;
}
