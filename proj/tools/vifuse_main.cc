#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vifuse/error.h"
#include "vifuse/io.h"
#include "vifuse/metrics.h"
#include "vifuse/pipeline.h"
#include "vifuse/synth.h"

namespace {

using namespace vifuse;
namespace fs = std::filesystem;

int ExitCode(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidFragmentLength:
      return 3;
    case ErrorCode::kParse:
    case ErrorCode::kVersionMismatch:
      return 4;
    case ErrorCode::kMissingInput:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kTooShort:
    case ErrorCode::kTopologyMismatch:
    case ErrorCode::kUnboundJoint:
    case ErrorCode::kUnknownSensor:
      return 5;
    case ErrorCode::kIo:
      return 6;
    default:
      return 7;
  }
}

struct SynthArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct RunArgs {
  std::string mode;
  std::string config;
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool fps_report = false;
  bool per_frame_metrics = false;
};

int Synth(const SynthArgs& args) {
  SynthConfig cfg = io::ParseSynthConfig(args.config.empty() ? "" : io::ReadText(args.config));
  if (args.seed) cfg.seed = *args.seed;
  const Dataset data = GenerateDataset(cfg);
  io::WriteDataset(args.out, data, cfg);
  std::printf("wrote %zu frames to %s\n", data.truth.size(), args.out.c_str());
  return 0;
}

std::string PerFrameMetrics(const std::vector<Pose>& pred, const std::vector<Pose>& gt) {
  std::ostringstream os;
  os << "frame mpjpe\n";
  for (size_t i = 0; i < pred.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu %.6f\n", i, Mpjpe({pred[i]}, {gt[i]}));
    os << buf;
  }
  return os.str();
}

int Run(const RunArgs& args) {
  fs::path base = fs::current_path();
  std::string text;
  if (!args.config.empty()) {
    text = io::ReadText(args.config);
    base = fs::absolute(args.config).parent_path();
  }
  io::RunConfig cfg = io::ParseRunConfig(text, base);
  if (!args.mode.empty()) cfg.mode = ParseMode(args.mode);
  if (!args.dataset.empty()) cfg.dataset = args.dataset;
  if (args.seed) cfg.seed = *args.seed;

  const io::LoadedRun run = io::LoadRun(cfg);
  const PipelineResult result = RunPipeline(cfg.mode, run.inputs, cfg.options);

  const fs::path out(args.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out.string() + ": " + ec.message());

  std::ostringstream poses;
  io::WritePose3d(poses, result.poses, run.inputs.fps);
  io::WriteFile(out / "output.pose3d", poses.str());

  std::vector<std::string> names;
  for (const Joint& j : run.inputs.skeleton.joints()) names.push_back(j.name);

  if (run.truth) {
    const MetricReport report =
        Evaluate(result.poses, *run.truth, run.inputs.fps, cfg.per_second_metrics);
    const std::string table = FormatReport(report, names);
    io::WriteFile(out / "report.txt", table);
    io::WriteFile(out / "report.json", io::ReportJson(report, cfg, names));
    std::printf("mode %s: MPJPE %.3f mm, MPJAE %.3f, MPJJE %.3f\n", ModeName(cfg.mode),
                report.mpjpe, report.mpjae, report.mpjje);
    if (args.per_frame_metrics) {
      io::WriteFile(out / "per_frame.txt", PerFrameMetrics(result.poses, *run.truth));
    }
  } else {
    std::printf("mode %s: %zu frames refined (no ground truth)\n", ModeName(cfg.mode),
                result.poses.size());
  }
  if (args.fps_report) {
    const RefineStats& s = result.stats;
    std::printf("fragments %d, line-search failures %d, solver %.3f s, wall %.3f s\n",
                s.fragments, s.line_search_failures, s.solver_seconds, s.wall_seconds);
    std::printf("throughput %.2f fragments/s, %.2f frames/s\n", s.fragments_per_second(),
                s.frames_per_second(static_cast<int>(result.poses.size())));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual-inertial pose refinement"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("--config", synth.config, "Synthesis config (JSON)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Override the config seed");

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Refine a pose stream");
  run_cmd->add_option("--mode", run.mode, "baseline, rto, sf2 or rtof")
      ->check(CLI::IsMember({"baseline", "rto", "sf2", "rtof"}));
  run_cmd->add_option("--config", run.config, "Run config (JSON)");
  run_cmd->add_option("--dataset", run.dataset, "Dataset directory");
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_flag("--fps-report", run.fps_report, "Print optimizer throughput");
  run_cmd->add_flag("--per-frame-metrics", run.per_frame_metrics, "Write per-frame MPJPE");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) return Synth(synth);
    return Run(run);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", ErrorCodeName(e.code()), e.message().c_str());
    return ExitCode(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error [Internal]: %s\n", e.what());
    return 1;
  }
}
