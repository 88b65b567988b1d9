#include "vifuse/io.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace vifuse::io {

namespace {

using json = nlohmann::json;

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-empty line split on whitespace; false at end of input.
  bool Next(std::vector<std::string>* tokens) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      std::istringstream ss(line);
      tokens->clear();
      for (std::string t; ss >> t;) tokens->push_back(std::move(t));
      if (!tokens->empty()) return true;
    }
    return false;
  }

  int line() const { return line_; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_) + ": " + what);
  }

  double Number(const std::string& token) const {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') Fail("'" + token + "' is not a number");
    return v;
  }

  double Finite(const std::string& token) const {
    const double v = Number(token);
    if (!std::isfinite(v)) Fail("'" + token + "' is not finite");
    return v;
  }

  int Integer(const std::string& token) const {
    const double v = Finite(token);
    if (v != std::floor(v) || std::abs(v) > 1e9) Fail("'" + token + "' is not an integer");
    return static_cast<int>(v);
  }

  // Reads the header and returns its key/value pairs.
  std::map<std::string, std::string> Header(const std::string& schema) {
    std::vector<std::string> t;
    if (!Next(&t)) Fail("missing #format header");
    if (t[0] != "#format" || t.size() < 3) Fail("expected '#format <schema> <version>'");
    if (t[1] != schema) Fail("expected schema '" + schema + "', found '" + t[1] + "'");
    if (t[2] != std::to_string(kFormatVersion)) {
      throw Error(ErrorCode::kVersionMismatch,
                  "line " + std::to_string(line_) + ": " + schema + " version " + t[2] +
                      " is not supported (expected " + std::to_string(kFormatVersion) + ")");
    }
    if ((t.size() - 3) % 2 != 0) Fail("header keys and values must pair up");
    std::map<std::string, std::string> kv;
    for (size_t i = 3; i + 1 < t.size(); i += 2) kv[t[i]] = t[i + 1];
    return kv;
  }

  int HeaderInt(const std::map<std::string, std::string>& kv, const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) Fail("header lacks '" + key + "'");
    return Integer(it->second);
  }

  double HeaderDouble(const std::map<std::string, std::string>& kv, const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) Fail("header lacks '" + key + "'");
    return Finite(it->second);
  }

 private:
  std::istream& is_;
  int line_ = 0;
};

void CheckFrameIndex(const LineReader& r, const std::string& token, int expected) {
  const int frame = r.Integer(token);
  if (frame != expected) {
    r.Fail("expected frame " + std::to_string(expected) + ", found " + std::to_string(frame));
  }
}

std::string QuatText(const Rotationd& q) {
  return Num(q.w()) + " " + Num(q.x()) + " " + Num(q.y()) + " " + Num(q.z());
}

Rotationd ParseQuat(const LineReader& r, const std::vector<std::string>& t, size_t at) {
  const double w = r.Finite(t[at]);
  const double x = r.Finite(t[at + 1]);
  const double y = r.Finite(t[at + 2]);
  const double z = r.Finite(t[at + 3]);
  if (std::abs(std::sqrt(w * w + x * x + y * y + z * z) - 1.0) > 1e-6) {
    r.Fail("quaternion is not unit length");
  }
  return Rotationd::FromQuaternion(w, x, y, z);
}

Vec3 ParseVec(const LineReader& r, const std::vector<std::string>& t, size_t at) {
  return Vec3(r.Finite(t[at]), r.Finite(t[at + 1]), r.Finite(t[at + 2]));
}

}  // namespace

void WritePose3d(std::ostream& os, const std::vector<Pose>& poses, double fps) {
  const long joints = poses.empty() ? 0 : poses.front().cols();
  os << "#format pose3d " << kFormatVersion << " frames " << poses.size() << " joints " << joints
     << " fps " << Num(fps) << "\n";
  for (size_t i = 0; i < poses.size(); ++i) {
    os << i;
    for (Eigen::Index j = 0; j < poses[i].cols(); ++j) {
      os << ' ' << Num(poses[i](0, j)) << ' ' << Num(poses[i](1, j)) << ' ' << Num(poses[i](2, j));
    }
    os << '\n';
  }
}

PoseStream ReadPose3d(std::istream& is) {
  LineReader r(is);
  const auto kv = r.Header("pose3d");
  const int frames = r.HeaderInt(kv, "frames");
  const int joints = r.HeaderInt(kv, "joints");
  PoseStream out;
  out.fps = r.HeaderDouble(kv, "fps");
  std::vector<std::string> t;
  while (r.Next(&t)) {
    if (t.size() != static_cast<size_t>(1 + 3 * joints)) {
      r.Fail("expected " + std::to_string(1 + 3 * joints) + " fields, found " +
             std::to_string(t.size()));
    }
    CheckFrameIndex(r, t[0], static_cast<int>(out.poses.size()));
    Pose pose(3, joints);
    for (int j = 0; j < joints; ++j) pose.col(j) = ParseVec(r, t, 1 + 3 * j);
    out.poses.push_back(std::move(pose));
  }
  if (static_cast<int>(out.poses.size()) != frames) {
    r.Fail("header announces " + std::to_string(frames) + " frames, found " +
           std::to_string(out.poses.size()));
  }
  return out;
}

void WritePose2d(std::ostream& os, const std::vector<Keypoints>& keypoints, double fps) {
  const long joints = keypoints.empty() ? 0 : keypoints.front().cols();
  os << "#format pose2d " << kFormatVersion << " frames " << keypoints.size() << " joints "
     << joints << " fps " << Num(fps) << "\n";
  for (size_t i = 0; i < keypoints.size(); ++i) {
    os << i;
    for (Eigen::Index j = 0; j < keypoints[i].cols(); ++j) {
      if (!keypoints[i].col(j).allFinite()) {
        os << " nan nan";
      } else {
        os << ' ' << Num(keypoints[i](0, j)) << ' ' << Num(keypoints[i](1, j));
      }
    }
    os << '\n';
  }
}

KeypointStream ReadPose2d(std::istream& is) {
  LineReader r(is);
  const auto kv = r.Header("pose2d");
  const int frames = r.HeaderInt(kv, "frames");
  const int joints = r.HeaderInt(kv, "joints");
  KeypointStream out;
  out.fps = r.HeaderDouble(kv, "fps");
  std::vector<std::string> t;
  while (r.Next(&t)) {
    if (t.size() != static_cast<size_t>(1 + 2 * joints)) {
      r.Fail("expected " + std::to_string(1 + 2 * joints) + " fields, found " +
             std::to_string(t.size()));
    }
    CheckFrameIndex(r, t[0], static_cast<int>(out.keypoints.size()));
    Keypoints kp(2, joints);
    for (int j = 0; j < joints; ++j) {
      const double u = r.Number(t[1 + 2 * j]);
      const double v = r.Number(t[2 + 2 * j]);
      if (std::isnan(u) != std::isnan(v)) r.Fail("occluded joints need 'nan nan'");
      if (std::isinf(u) || std::isinf(v)) r.Fail("infinite keypoint coordinate");
      kp.col(j) = Eigen::Vector2d(u, v);
    }
    out.keypoints.push_back(std::move(kp));
  }
  if (static_cast<int>(out.keypoints.size()) != frames) {
    r.Fail("header announces " + std::to_string(frames) + " frames, found " +
           std::to_string(out.keypoints.size()));
  }
  return out;
}

void WriteImu(std::ostream& os, const ImuStream& imu) {
  const size_t sensors = imu.frames.empty() ? 0 : imu.frames.front().size();
  os << "#format imu " << kFormatVersion << " frames " << imu.frames.size() << " sensors "
     << sensors << " fps " << Num(imu.fps) << "\n";
  for (size_t i = 0; i < imu.frames.size(); ++i) {
    for (const ImuSample& s : imu.frames[i]) {
      os << i << ' ' << s.sensor << ' ' << QuatText(s.orientation) << ' '
         << Num(s.acceleration.x()) << ' ' << Num(s.acceleration.y()) << ' '
         << Num(s.acceleration.z()) << '\n';
    }
  }
}

ImuStream ReadImu(std::istream& is) {
  LineReader r(is);
  const auto kv = r.Header("imu");
  const int frames = r.HeaderInt(kv, "frames");
  r.HeaderInt(kv, "sensors");
  ImuStream out;
  out.fps = r.HeaderDouble(kv, "fps");
  if (frames < 0) r.Fail("negative frame count");
  out.frames.resize(frames);
  std::vector<std::string> t;
  int last_frame = 0;
  while (r.Next(&t)) {
    if (t.size() != 9) r.Fail("expected 9 fields, found " + std::to_string(t.size()));
    const int frame = r.Integer(t[0]);
    if (frame < last_frame || frame >= frames) {
      r.Fail("frame " + std::to_string(frame) + " out of order or beyond header");
    }
    last_frame = frame;
    ImuSample s;
    s.sensor = r.Integer(t[1]);
    for (const ImuSample& other : out.frames[frame]) {
      if (other.sensor == s.sensor) r.Fail("duplicate sensor " + t[1] + " in frame " + t[0]);
    }
    s.orientation = ParseQuat(r, t, 2);
    s.acceleration = ParseVec(r, t, 6);
    out.frames[frame].push_back(s);
  }
  return out;
}

void WriteSkeleton(std::ostream& os, const Skeleton& skel) {
  os << "#format skeleton " << kFormatVersion << "\n";
  for (int j = 0; j < skel.num_joints(); ++j) {
    const int p = skel.parent(j);
    os << "joint " << skel.joint(j).name << ' ' << (p < 0 ? std::string("-") : skel.joint(p).name)
       << ' ' << Num(skel.tpose()(0, j)) << ' ' << Num(skel.tpose()(1, j)) << ' '
       << Num(skel.tpose()(2, j)) << '\n';
  }
}

Skeleton ReadSkeleton(std::istream& is) {
  LineReader r(is);
  r.Header("skeleton");
  std::vector<Joint> joints;
  std::vector<Vec3> positions;
  std::vector<std::string> t;
  while (r.Next(&t)) {
    if (t[0] != "joint" || t.size() != 6) r.Fail("expected 'joint <name> <parent> x y z'");
    Joint joint{t[1], -1};
    if (t[2] != "-") {
      for (size_t i = 0; i < joints.size(); ++i) {
        if (joints[i].name == t[2]) joint.parent = static_cast<int>(i);
      }
      if (joint.parent < 0) r.Fail("parent '" + t[2] + "' is not listed before '" + t[1] + "'");
    }
    joints.push_back(joint);
    positions.push_back(ParseVec(r, t, 3));
  }
  Pose tpose(3, static_cast<Eigen::Index>(positions.size()));
  for (size_t j = 0; j < positions.size(); ++j) tpose.col(static_cast<Eigen::Index>(j)) = positions[j];
  return Skeleton(std::move(joints), std::move(tpose));
}

void WriteCalibration(std::ostream& os, const CalibrationSet& calib, const Skeleton& skel) {
  os << "#format calibration " << kFormatVersion << "\n";
  os << "gravity " << Num(calib.gravity.x()) << ' ' << Num(calib.gravity.y()) << ' '
     << Num(calib.gravity.z()) << '\n';
  for (const auto& [k, s] : calib.sensors) {
    os << "sensor " << k << ' ' << skel.joint(s.joint).name << ' ' << QuatText(s.ref_to_global)
       << ' ' << QuatText(s.ref_to_joint) << '\n';
  }
}

CalibrationSet ReadCalibration(std::istream& is, const Skeleton& skel) {
  LineReader r(is);
  r.Header("calibration");
  CalibrationSet calib;
  std::vector<std::string> t;
  while (r.Next(&t)) {
    if (t[0] == "gravity" && t.size() == 4) {
      calib.gravity = ParseVec(r, t, 1);
    } else if (t[0] == "sensor" && t.size() == 11) {
      const int k = r.Integer(t[1]);
      SensorCalibration s;
      s.joint = skel.FindJoint(t[2]);
      if (s.joint < 0) {
        throw Error(ErrorCode::kUnboundJoint,
                    "line " + std::to_string(r.line()) + ": unknown joint '" + t[2] + "'");
      }
      s.ref_to_global = ParseQuat(r, t, 3);
      s.ref_to_joint = ParseQuat(r, t, 7);
      if (!calib.sensors.emplace(k, s).second) r.Fail("duplicate sensor " + t[1]);
    } else {
      r.Fail("expected 'gravity x y z' or 'sensor <id> <joint> <8 quaternion values>'");
    }
  }
  calib.Validate(skel);
  return calib;
}

void WriteCamera(std::ostream& os, const Camera& camera) {
  os << "#format camera " << kFormatVersion << "\n";
  os << "intrinsics " << Num(camera.fx) << ' ' << Num(camera.fy) << ' ' << Num(camera.cx) << ' '
     << Num(camera.cy) << '\n';
  os << "rotation " << QuatText(camera.world_to_camera) << '\n';
  os << "translation " << Num(camera.translation.x()) << ' ' << Num(camera.translation.y()) << ' '
     << Num(camera.translation.z()) << '\n';
}

Camera ReadCamera(std::istream& is) {
  LineReader r(is);
  r.Header("camera");
  Camera cam;
  int seen = 0;
  std::vector<std::string> t;
  while (r.Next(&t)) {
    if (t[0] == "intrinsics" && t.size() == 5) {
      cam.fx = r.Finite(t[1]);
      cam.fy = r.Finite(t[2]);
      cam.cx = r.Finite(t[3]);
      cam.cy = r.Finite(t[4]);
      if (!(cam.fx > 0.0 && cam.fy > 0.0)) r.Fail("focal lengths must be positive");
      seen |= 1;
    } else if (t[0] == "rotation" && t.size() == 5) {
      cam.world_to_camera = ParseQuat(r, t, 1);
      seen |= 2;
    } else if (t[0] == "translation" && t.size() == 4) {
      cam.translation = ParseVec(r, t, 1);
      seen |= 4;
    } else {
      r.Fail("unexpected camera record '" + t[0] + "'");
    }
  }
  if (seen != 7) r.Fail("camera needs intrinsics, rotation and translation");
  return cam;
}

void WriteFile(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << contents;
  if (!os) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

json ParseJson(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
}

template <typename T>
void Get(const json& j, const char* key, T* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config key '") + key + "': " + e.what());
  }
}

void CheckKeys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw Error(ErrorCode::kInvalidConfig, where + ": unknown key '" + item.key() + "'");
    }
  }
}

json NoiseJson(const NoiseSpec& n, const Skeleton& skel) {
  json joints = json::array();
  for (int j : n.depth_joints) joints.push_back(skel.joint(j).name);
  return {{"depth_sigma", n.depth_sigma},     {"depth_joints", joints},
          {"pose_sigma", n.pose_sigma},       {"pixel_sigma", n.pixel_sigma},
          {"rotation_sigma", n.rotation_sigma}, {"accel_sigma", n.accel_sigma},
          {"occlusion_probability", n.occlusion_probability}};
}

}  // namespace

SynthConfig ParseSynthConfig(const std::string& json_text) {
  const Skeleton skel = DefaultSkeleton();
  SynthConfig cfg;
  cfg.noise = DefaultNoiseSpec(skel);
  if (json_text.empty()) return cfg;
  const json j = ParseJson(json_text);
  CheckKeys(j, {"fps", "duration", "camera_distance", "seed", "with_imu", "noise"}, "synth config");
  Get(j, "fps", &cfg.fps);
  Get(j, "duration", &cfg.duration);
  Get(j, "camera_distance", &cfg.camera_distance);
  Get(j, "seed", &cfg.seed);
  Get(j, "with_imu", &cfg.with_imu);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    CheckKeys(n, {"depth_sigma", "depth_joints", "pose_sigma", "pixel_sigma", "rotation_sigma",
                  "accel_sigma", "occlusion_probability"},
              "noise");
    Get(n, "depth_sigma", &cfg.noise.depth_sigma);
    Get(n, "pose_sigma", &cfg.noise.pose_sigma);
    Get(n, "pixel_sigma", &cfg.noise.pixel_sigma);
    Get(n, "rotation_sigma", &cfg.noise.rotation_sigma);
    Get(n, "accel_sigma", &cfg.noise.accel_sigma);
    Get(n, "occlusion_probability", &cfg.noise.occlusion_probability);
    if (n.contains("depth_joints")) {
      std::vector<std::string> names;
      Get(n, "depth_joints", &names);
      cfg.noise.depth_joints.clear();
      for (const std::string& name : names) {
        const int idx = skel.FindJoint(name);
        if (idx < 0) throw Error(ErrorCode::kInvalidConfig, "unknown depth joint '" + name + "'");
        cfg.noise.depth_joints.push_back(idx);
      }
    }
  }
  if (!(cfg.fps > 0.0) || !(cfg.duration > 0.0) || !(cfg.camera_distance > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "fps, duration and camera_distance must be positive");
  }
  cfg.noise.Validate();
  return cfg;
}

void WriteDataset(const std::filesystem::path& dir, const Dataset& data, const SynthConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  auto emit = [&](const char* name, auto&& writer) {
    std::ostringstream os;
    writer(os);
    WriteFile(dir / name, os.str());
  };
  emit(DatasetFiles::kSkeleton, [&](std::ostream& os) { WriteSkeleton(os, data.skeleton); });
  emit(DatasetFiles::kCamera, [&](std::ostream& os) { WriteCamera(os, data.camera); });
  emit(DatasetFiles::kTruth, [&](std::ostream& os) { WritePose3d(os, data.truth, data.fps); });
  emit(DatasetFiles::kLifted, [&](std::ostream& os) { WritePose3d(os, data.lifted, data.fps); });
  emit(DatasetFiles::kKeypoints,
       [&](std::ostream& os) { WritePose2d(os, data.keypoints, data.fps); });
  std::vector<std::string> files = {DatasetFiles::kSkeleton, DatasetFiles::kCamera,
                                    DatasetFiles::kTruth, DatasetFiles::kLifted,
                                    DatasetFiles::kKeypoints};
  if (config.with_imu) {
    emit(DatasetFiles::kCalibration,
         [&](std::ostream& os) { WriteCalibration(os, data.calibration, data.skeleton); });
    emit(DatasetFiles::kImu, [&](std::ostream& os) { WriteImu(os, data.imu); });
    emit(DatasetFiles::kTruthImu, [&](std::ostream& os) { WriteImu(os, data.truth_imu); });
    files.insert(files.end(),
                 {DatasetFiles::kCalibration, DatasetFiles::kImu, DatasetFiles::kTruthImu});
  }
  const json manifest = {
      {"generator", "vifuse synth"},
      {"format_version", kFormatVersion},
      {"seed", config.seed},
      {"fps", config.fps},
      {"duration", config.duration},
      {"frames", data.truth.size()},
      {"camera_distance", config.camera_distance},
      {"with_imu", config.with_imu},
      {"noise", NoiseJson(config.noise, data.skeleton)},
      {"files", files},
  };
  WriteFile(dir / DatasetFiles::kManifest, manifest.dump(2) + "\n");
}

RunConfig ParseRunConfig(const std::string& json_text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  const json j = ParseJson(json_text.empty() ? "{}" : json_text);
  CheckKeys(j, {"mode", "dataset", "inputs", "energy", "solver", "threads", "streaming",
                "per_second_metrics", "seed"},
            "run config");
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (j.contains("mode")) {
    std::string mode;
    Get(j, "mode", &mode);
    cfg.mode = ParseMode(mode);
  }
  if (j.contains("dataset")) {
    std::string d;
    Get(j, "dataset", &d);
    cfg.dataset = resolve(d);
  }
  if (j.contains("inputs")) {
    const json& in = j.at("inputs");
    CheckKeys(in, {"skeleton", "calibration", "camera", "poses", "keypoints", "imu", "truth"},
              "inputs");
    auto path = [&](const char* key, std::optional<std::filesystem::path>* out) {
      if (!in.contains(key)) return;
      std::string p;
      Get(in, key, &p);
      *out = resolve(p);
    };
    path("skeleton", &cfg.skeleton);
    path("calibration", &cfg.calibration);
    path("camera", &cfg.camera);
    path("poses", &cfg.poses);
    path("keypoints", &cfg.keypoints);
    path("imu", &cfg.imu);
    path("truth", &cfg.truth);
  }
  EnergyConfig& e = cfg.options.energy;
  if (j.contains("energy")) {
    const json& en = j.at("energy");
    CheckKeys(en, {"k_visual", "k_inertial", "k_acceleration", "k_bone", "k_smooth",
                   "theta_t_deg", "fragment_length"},
              "energy");
    Get(en, "k_visual", &e.k_visual);
    Get(en, "k_inertial", &e.k_inertial);
    Get(en, "k_acceleration", &e.k_acceleration);
    Get(en, "k_bone", &e.k_bone);
    Get(en, "k_smooth", &e.k_smooth);
    Get(en, "fragment_length", &e.fragment_length);
    if (en.contains("theta_t_deg")) {
      double deg = 0.0;
      Get(en, "theta_t_deg", &deg);
      e.theta_t = deg * std::numbers::pi / 180.0;
    }
  }
  SolverSettings& s = cfg.options.solver;
  if (j.contains("solver")) {
    const json& so = j.at("solver");
    CheckKeys(so, {"max_iterations", "history_size", "gradient_tolerance", "wolfe_c1", "wolfe_c2",
                   "max_line_search_evaluations"},
              "solver");
    Get(so, "max_iterations", &s.max_iterations);
    Get(so, "history_size", &s.history_size);
    Get(so, "gradient_tolerance", &s.gradient_tolerance);
    Get(so, "wolfe_c1", &s.wolfe_c1);
    Get(so, "wolfe_c2", &s.wolfe_c2);
    Get(so, "max_line_search_evaluations", &s.max_line_search_evaluations);
  }
  Get(j, "threads", &cfg.options.threads);
  Get(j, "streaming", &cfg.options.streaming);
  Get(j, "per_second_metrics", &cfg.per_second_metrics);
  Get(j, "seed", &cfg.seed);
  e.Validate();
  s.Validate();
  if (cfg.options.threads < 1) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 1");
  return cfg;
}

LoadedRun LoadRun(const RunConfig& config) {
  auto pick = [&](const std::optional<std::filesystem::path>& explicit_path,
                  const char* default_name) -> std::optional<std::filesystem::path> {
    if (explicit_path) return explicit_path;
    if (config.dataset.empty()) return std::nullopt;
    const std::filesystem::path p = config.dataset / default_name;
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;
  };

  LoadedRun run;
  PipelineInputs& in = run.inputs;
  if (auto p = pick(config.skeleton, DatasetFiles::kSkeleton)) {
    in.skeleton = ReadFile<Skeleton>(*p, [](std::istream& is) { return ReadSkeleton(is); });
  }
  const auto poses_path = pick(config.poses, DatasetFiles::kLifted);
  if (!poses_path) throw Error(ErrorCode::kMissingInput, "no 3D pose stream given");
  PoseStream poses =
      ReadFile<PoseStream>(*poses_path, [](std::istream& is) { return ReadPose3d(is); });
  in.fps = poses.fps;
  in.poses = std::move(poses.poses);

  if (auto p = pick(config.keypoints, DatasetFiles::kKeypoints)) {
    in.keypoints =
        ReadFile<KeypointStream>(*p, [](std::istream& is) { return ReadPose2d(is); }).keypoints;
  }
  if (auto p = pick(config.camera, DatasetFiles::kCamera)) {
    in.camera = ReadFile<Camera>(*p, [](std::istream& is) { return ReadCamera(is); });
  }
  if (auto p = pick(config.calibration, DatasetFiles::kCalibration)) {
    const Skeleton& skel = in.skeleton;
    in.calibration = ReadFile<CalibrationSet>(
        *p, [&](std::istream& is) { return ReadCalibration(is, skel); });
  }
  if (auto p = pick(config.imu, DatasetFiles::kImu)) {
    in.imu = ReadFile<ImuStream>(*p, [](std::istream& is) { return ReadImu(is); });
  }
  if (auto p = pick(config.truth, DatasetFiles::kTruth)) {
    run.truth =
        ReadFile<PoseStream>(*p, [](std::istream& is) { return ReadPose3d(is); }).poses;
  }
  return run;
}

std::string ReportJson(const MetricReport& report, const RunConfig& config,
                       const std::vector<std::string>& joint_names) {
  json per_joint = json::array();
  for (size_t j = 0; j < report.mpjpe_per_joint.size(); ++j) {
    per_joint.push_back({{"joint", j < joint_names.size() ? joint_names[j] : std::to_string(j)},
                         {"mpjpe", report.mpjpe_per_joint[j]},
                         {"mpjae", report.mpjae_per_joint[j]},
                         {"mpjje", report.mpjje_per_joint[j]}});
  }
  const EnergyConfig& e = config.options.energy;
  const json out = {
      {"mode", ModeName(config.mode)},
      {"seed", config.seed},
      {"frames", report.frames},
      {"per_second", report.per_second},
      {"mpjpe", report.mpjpe},
      {"mpjae", report.mpjae},
      {"mpjje", report.mpjje},
      {"energy",
       {{"k_visual", e.k_visual},
        {"k_inertial", e.k_inertial},
        {"k_acceleration", e.k_acceleration},
        {"k_bone", e.k_bone},
        {"k_smooth", e.k_smooth},
        {"theta_t", e.theta_t},
        {"fragment_length", e.fragment_length}}},
      {"per_joint", per_joint},
  };
  return out.dump(2) + "\n";
}

}  // namespace vifuse::io
