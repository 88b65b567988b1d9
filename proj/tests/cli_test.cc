#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vifuse_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(const std::string& args) {
    const std::string cmd = std::string(VIFUSE_CLI) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }

  std::string Slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  void WriteConfig(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesStreamsAndManifest) {
  WriteConfig("synth.json", R"({"duration": 60})");
  ASSERT_EQ(Run("synth --config " + (dir_ / "synth.json").string() + " --out " + (dir_ / "a").string()), 0);
  int streams = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    const std::string ext = e.path().extension().string();
    if (ext == ".pose3d" || ext == ".pose2d" || ext == ".imu") ++streams;
  }
  EXPECT_EQ(streams, 5);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "manifest.json"));
  for (const char* f : {"truth.pose3d", "lifted.pose3d", "keypoints.pose2d", "imu.imu", "truth.imu"}) {
    const std::string header = Slurp(dir_ / "a" / f).substr(0, 80);
    EXPECT_NE(header.find("frames 1500 "), std::string::npos) << f;
  }
  ASSERT_EQ(Run("synth --config " + (dir_ / "synth.json").string() + " --out " + (dir_ / "b").string()), 0);
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    EXPECT_EQ(Slurp(e.path()), Slurp(dir_ / "b" / e.path().filename())) << e.path();
  }
}

TEST_F(CliTest, ModesAndValidation) {
  WriteConfig("synth.json", R"({"duration": 4, "with_imu": false})");
  ASSERT_EQ(Run("synth --config " + (dir_ / "synth.json").string() + " --out " + (dir_ / "d").string()), 0);
  const std::string ds = " --dataset " + (dir_ / "d").string();
  ASSERT_EQ(Run("run --mode baseline" + ds + " --out " + (dir_ / "base").string()), 0);
  // Baseline output equals the input stream byte for byte.
  EXPECT_EQ(Slurp(dir_ / "base" / "output.pose3d"), Slurp(dir_ / "d" / "lifted.pose3d"));
  EXPECT_TRUE(fs::exists(dir_ / "base" / "report.json"));
  EXPECT_EQ(Run("run --mode rto --fps-report --per-frame-metrics" + ds + " --out " + (dir_ / "rto").string()), 0);
  EXPECT_NE(Slurp(dir_ / "stdout.txt").find("fragments/s"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "rto" / "per_frame.txt"));
  const int code = Run("run --mode rtof" + ds + " --out " + (dir_ / "rtof").string());
  EXPECT_NE(code, 0);
  EXPECT_NE(Slurp(dir_ / "stderr.txt").find("MissingInput"), std::string::npos);
}

TEST_F(CliTest, ErrorsAreCategorized) {
  EXPECT_NE(Run("run --mode nonsense --out x"), 0);
  WriteConfig("bad.json", R"({"energy": {"k_bone": -1}})");
  const int config_code = Run("run --config " + (dir_ / "bad.json").string() + " --out " + (dir_ / "o").string());
  EXPECT_NE(config_code, 0);
  EXPECT_NE(Slurp(dir_ / "stderr.txt").find("InvalidConfig"), std::string::npos);
  const int missing = Run("run --dataset " + (dir_ / "none").string() + " --out " + (dir_ / "o").string());
  EXPECT_NE(missing, 0);
  EXPECT_NE(missing, config_code);
  // A corrupt line in a stream is reported with its line number.
  WriteConfig("synth.json", R"({"duration": 1})");
  ASSERT_EQ(Run("synth --config " + (dir_ / "synth.json").string() + " --out " + (dir_ / "d").string()), 0);
  std::string text = Slurp(dir_ / "d" / "lifted.pose3d");
  size_t pos = 0;
  for (int line = 0; line < 6; ++line) pos = text.find('\n', pos) + 1;
  text.insert(pos, "x");
  std::ofstream(dir_ / "d" / "lifted.pose3d", std::ios::trunc) << text;
  EXPECT_NE(Run("run --mode baseline --dataset " + (dir_ / "d").string() + " --out " + (dir_ / "o").string()), 0);
  EXPECT_NE(Slurp(dir_ / "stderr.txt").find("line 7"), std::string::npos);
}

}  // namespace
