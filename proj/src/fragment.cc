#include "vifuse/fragment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <string>
#include <thread>

namespace vifuse {

FragmentSchedule FragmentSchedule::Build(int num_frames, int fragment_length) {
  if (fragment_length < 4 || fragment_length % 2 != 0) {
    throw Error(ErrorCode::kInvalidFragmentLength,
                "fragment length must be even and >= 4, got " + std::to_string(fragment_length));
  }
  if (num_frames < 1) {
    throw Error(ErrorCode::kTooShort, "cannot schedule an empty sequence");
  }
  FragmentSchedule s;
  s.num_frames_ = num_frames;
  s.fragment_length_ = fragment_length;
  const int h = fragment_length / 2;
  const int blocks = (num_frames + h - 1) / h;
  // h front replicas, the sequence rounded up to whole blocks, h back replicas.
  s.padded_length_ = (blocks + 2) * h;
  for (int w = 0; w <= blocks; ++w) {
    s.windows_.push_back({w * h, w * h + fragment_length});
  }
  return s;
}

int FragmentSchedule::SourceFrame(int padded) const {
  return std::clamp(padded - stride(), 0, num_frames_ - 1);
}

bool FragmentSchedule::IsPadding(int padded) const {
  const int t = padded - stride();
  return t < 0 || t >= num_frames_;
}

std::array<int, 2> FragmentSchedule::CoveringWindows(int frame) const {
  const int block = ToPadded(frame) / stride();
  return {block - 1, block};
}

std::pair<Fragment, Observations> BuildWindowProblem(
    int start, double fps, const Matrix34d& projection, const std::vector<SensorBinding>& sensors,
    const std::vector<const FrameInput*>& window_frames, const std::vector<bool>& padding) {
  const int n = static_cast<int>(window_frames.size());
  if (n == 0 || static_cast<int>(padding.size()) != n) {
    throw Error(ErrorCode::kScheduleMismatch, "window frames and padding flags disagree");
  }
  const int joints = static_cast<int>(window_frames.front()->pose.cols());
  const int k = static_cast<int>(sensors.size());

  Fragment frag;
  frag.num_frames = n;
  frag.num_joints = joints;
  frag.fps = fps;
  frag.start = start;
  frag.positions.resize(3 * n * joints);

  Observations obs;
  obs.projection = projection;
  const bool has_keypoints = window_frames.front()->keypoints.cols() > 0;
  if (has_keypoints) obs.keypoints.reserve(n);
  obs.inertial.resize(k);
  for (int s = 0; s < k; ++s) {
    obs.inertial[s].joint = sensors[s].joint;
    obs.inertial[s].parent = sensors[s].parent;
    obs.inertial[s].acceleration.resize(3, n);
    obs.inertial[s].bone.resize(3, n);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    const FrameInput& f = *window_frames[i];
    if (f.pose.cols() != joints) {
      throw Error(ErrorCode::kTopologyMismatch, "frames differ in joint count");
    }
    frag.frame(i) = f.pose;
    if (has_keypoints) obs.keypoints.push_back(f.keypoints);
    for (int s = 0; s < k; ++s) {
      if (f.imu_acceleration.cols() != k || f.imu_bone.cols() != k) {
        throw Error(ErrorCode::kLengthMismatch, "frame IMU columns differ from sensor count");
      }
      if (padding[i]) {
        obs.inertial[s].acceleration.col(i).setConstant(nan);
      } else {
        obs.inertial[s].acceleration.col(i) = f.imu_acceleration.col(s);
      }
      obs.inertial[s].bone.col(i) = f.imu_bone.col(s);
    }
  }
  return {std::move(frag), std::move(obs)};
}

FragmentResult MinimizeFragment(const Fragment& initial, const Observations& obs,
                                const EnergyConfig& cfg, const SolverSettings& settings) {
  const NormalizationScales scales = ComputeScales(initial, obs, cfg);
  const FragmentObjective objective(initial, obs, cfg, scales);
  FragmentResult result;
  result.fragment = initial;
  // The fragment tolerance is relative to the initial gradient, which shrinks as fragments grow.
  Eigen::VectorXd g0;
  objective(initial.positions, &g0);
  SolverSettings scaled = settings;
  if (g0.size() > 0) scaled.gradient_tolerance *= std::max(g0.cwiseAbs().maxCoeff(), 1e-300);
  result.summary = MinimizeLbfgs(objective, result.fragment.positions, scaled);
  result.line_search_failed = result.summary.status == SolverStatus::kLineSearchFailure;
  return result;
}

std::vector<Pose> MergeFragments(const FragmentSchedule& schedule,
                                 const std::vector<Fragment>& optimized) {
  if (optimized.size() != schedule.windows().size()) {
    throw Error(ErrorCode::kScheduleMismatch,
                "expected " + std::to_string(schedule.windows().size()) + " fragments, got " +
                    std::to_string(optimized.size()));
  }
  for (size_t w = 0; w < optimized.size(); ++w) {
    if (optimized[w].num_frames != schedule.fragment_length() ||
        optimized[w].start != schedule.windows()[w].start) {
      throw Error(ErrorCode::kScheduleMismatch,
                  "fragment " + std::to_string(w) + " does not match its window");
    }
  }
  std::vector<Pose> out;
  out.reserve(schedule.num_frames());
  for (int t = 0; t < schedule.num_frames(); ++t) {
    const int p = schedule.ToPadded(t);
    const auto [w0, w1] = schedule.CoveringWindows(t);
    const Fragment& a = optimized[w0];
    const Fragment& b = optimized[w1];
    out.emplace_back(0.5 * (a.frame(p - a.start) + b.frame(p - b.start)));
  }
  return out;
}

double RefineStats::fragments_per_second() const {
  return solver_seconds > 0.0 ? fragments / solver_seconds : 0.0;
}

double RefineStats::frames_per_second(int frames) const {
  return wall_seconds > 0.0 ? frames / wall_seconds : 0.0;
}

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

RefineResult RefineSequence(const SequenceInput& input, const EnergyConfig& cfg,
                            const SolverSettings& settings, int threads) {
  cfg.Validate();
  settings.Validate();
  RefineResult result;
  if (input.frames.empty()) return result;

  const auto t0 = Clock::now();
  const FragmentSchedule schedule =
      FragmentSchedule::Build(static_cast<int>(input.frames.size()), cfg.fragment_length);
  const int num_windows = static_cast<int>(schedule.windows().size());
  std::vector<Fragment> optimized(num_windows);
  std::vector<double> seconds(num_windows, 0.0);
  std::vector<char> failed(num_windows, 0);

  auto solve = [&](int w) {
    const auto start = Clock::now();
    const FragmentSchedule::Window& win = schedule.windows()[w];
    std::vector<const FrameInput*> frames;
    std::vector<bool> padding;
    for (int p = win.start; p < win.end; ++p) {
      frames.push_back(&input.frames[schedule.SourceFrame(p)]);
      padding.push_back(schedule.IsPadding(p));
    }
    auto [frag, obs] = BuildWindowProblem(win.start, input.fps, input.projection, input.sensors,
                                          frames, padding);
    FragmentResult r = MinimizeFragment(frag, obs, cfg, settings);
    optimized[w] = std::move(r.fragment);
    failed[w] = r.line_search_failed ? 1 : 0;
    seconds[w] = SecondsSince(start);
  };

  const int workers = std::clamp(threads, 1, num_windows);
  if (workers == 1) {
    for (int w = 0; w < num_windows; ++w) solve(w);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> has_error{false};
    {
      std::vector<std::jthread> pool;
      for (int i = 0; i < workers; ++i) {
        pool.emplace_back([&] {
          for (int w = next++; w < num_windows && !has_error; w = next++) {
            try {
              solve(w);
            } catch (...) {
              if (!has_error.exchange(true)) error = std::current_exception();
            }
          }
        });
      }
    }
    if (error) std::rethrow_exception(error);
  }

  result.poses = MergeFragments(schedule, optimized);
  result.stats.fragments = num_windows;
  for (int w = 0; w < num_windows; ++w) {
    result.stats.solver_seconds += seconds[w];
    result.stats.line_search_failures += failed[w];
  }
  result.stats.wall_seconds = SecondsSince(t0);
  return result;
}

StreamingRefiner::StreamingRefiner(double fps, const Matrix34d& projection,
                                   std::vector<SensorBinding> sensors, const EnergyConfig& cfg,
                                   const SolverSettings& settings)
    : fps_(fps),
      projection_(projection),
      sensors_(std::move(sensors)),
      cfg_(cfg),
      settings_(settings),
      stride_(cfg.fragment_length / 2) {
  cfg_.Validate();
  settings_.Validate();
}

const FrameInput& StreamingRefiner::Slot(int padded) const {
  const int t = std::clamp(padded - stride_, 0, frames_pushed_ - 1);
  return frames_.at(t - frames_base_);
}

std::vector<Pose> StreamingRefiner::Push(FrameInput frame) {
  if (finished_) {
    throw Error(ErrorCode::kInvalidConfig, "push after finish");
  }
  frames_.push_back(std::move(frame));
  ++frames_pushed_;
  std::vector<Pose> out;
  // A window is ready once its last slot holds a real frame.
  while (next_window_ * stride_ + cfg_.fragment_length <= stride_ + frames_pushed_) {
    RunWindow(next_window_, &out);
  }
  return out;
}

std::vector<Pose> StreamingRefiner::Finish() {
  std::vector<Pose> out;
  if (finished_ || frames_pushed_ == 0) {
    finished_ = true;
    return out;
  }
  finished_ = true;
  const int blocks = (frames_pushed_ + stride_ - 1) / stride_;
  while (next_window_ <= blocks) RunWindow(next_window_, &out);
  return out;
}

void StreamingRefiner::RunWindow(int w, std::vector<Pose>* out) {
  const auto t0 = Clock::now();
  const int start = w * stride_;
  std::vector<const FrameInput*> frames;
  std::vector<bool> padding;
  for (int p = start; p < start + cfg_.fragment_length; ++p) {
    frames.push_back(&Slot(p));
    padding.push_back(p < stride_ || p - stride_ >= frames_pushed_);
  }
  auto [frag, obs] = BuildWindowProblem(start, fps_, projection_, sensors_, frames, padding);
  FragmentResult r = MinimizeFragment(frag, obs, cfg_, settings_);
  ++stats_.fragments;
  if (r.line_search_failed) ++stats_.line_search_failures;

  const Fragment& cur = r.fragment;
  if (w > 0) {
    // Block w: originals [(w-1)h, wh), second half of window w-1, first half of w.
    for (int i = 0; i < stride_; ++i) {
      const int t = (w - 1) * stride_ + i;
      if (t >= frames_pushed_) break;
      out->emplace_back(0.5 * (previous_copy_[i] + Pose(cur.frame(i))));
    }
  }
  previous_copy_.clear();
  for (int i = stride_; i < cfg_.fragment_length; ++i) previous_copy_.emplace_back(cur.frame(i));
  ++next_window_;

  // Drop originals no later window needs.
  const int keep_from = std::max(0, next_window_ * stride_ - stride_);
  while (frames_base_ < keep_from && frames_base_ < frames_pushed_ - 1) {
    frames_.pop_front();
    ++frames_base_;
  }
  const double dt = SecondsSince(t0);
  stats_.solver_seconds += dt;
  stats_.wall_seconds += dt;
}

}  // namespace vifuse
