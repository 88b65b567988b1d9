#include "vifuse/metrics.h"

#include <random>

#include <gtest/gtest.h>

namespace vifuse {
namespace {

std::vector<Pose> RandomSequence(std::mt19937_64& rng, int frames, int joints) {
  std::normal_distribution<double> n(0.0, 50.0);
  std::vector<Pose> out(frames, Pose(3, joints));
  for (Pose& p : out) p = p.unaryExpr([&](double) { return n(rng); });
  return out;
}

// Polynomial motion x(t) = a + b t + c t^2 per coordinate, t in frames.
std::vector<Pose> Polynomial(int frames, int joints, double a, double b, double c) {
  std::vector<Pose> out;
  for (int i = 0; i < frames; ++i) out.push_back(Pose::Constant(3, joints, a + b * i + c * i * i));
  return out;
}

double Stencil(const std::vector<Pose>& p, const std::vector<Pose>& g, int i, int j,
               const std::vector<double>& w) {
  Vec3 d = Vec3::Zero();
  for (size_t s = 0; s < w.size(); ++s) d += w[s] * (p[i + s].col(j) - g[i + s].col(j));
  return d.norm();
}

// Brute force: mean over every (window, joint) of the stencil error norm.
double Oracle(const std::vector<Pose>& p, const std::vector<Pose>& g,
              const std::vector<double>& w) {
  double sum = 0.0;
  int count = 0;
  for (size_t i = 0; i + w.size() <= p.size(); ++i) {
    for (int j = 0; j < p[i].cols(); ++j) {
      sum += Stencil(p, g, static_cast<int>(i), j, w);
      ++count;
    }
  }
  return sum / count;
}

TEST(Mpjpe, KnownValues) {
  std::mt19937_64 rng(1);
  const auto gt = RandomSequence(rng, 10, 4);
  EXPECT_EQ(Mpjpe(gt, gt), 0.0);
  auto pred = gt;
  for (Pose& p : pred) p.colwise() += Vec3(3, 4, 0);
  EXPECT_NEAR(Mpjpe(pred, gt), 5.0, 1e-12);
}

TEST(Metrics, BruteForceOracles) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = RandomSequence(rng, 12, 5);
    const auto b = RandomSequence(rng, 12, 5);
    EXPECT_NEAR(Mpjpe(a, b), Oracle(a, b, {1}), 1e-9);
    EXPECT_NEAR(Mpjae(a, b, 25.0, false), Oracle(a, b, {1, -2, 1}), 1e-9);
    EXPECT_NEAR(Mpjje(a, b, 25.0, false), Oracle(a, b, {-1, 3, -3, 1}), 1e-9);
    EXPECT_NEAR(Mpjae(a, b, 25.0), Oracle(a, b, {1, -2, 1}) * 625.0, 1e-6);
    EXPECT_NEAR(Mpjje(a, b, 25.0), Oracle(a, b, {-1, 3, -3, 1}) * 15625.0, 1e-4);
  }
}

TEST(Mpjae, LinearAndOffsetVanish) {
  const auto a = Polynomial(10, 3, 1.0, 2.0, 0.0);
  const auto b = Polynomial(10, 3, -4.0, 7.0, 0.0);
  EXPECT_NEAR(Mpjae(a, b, 25.0), 0.0, 1e-9);
  std::mt19937_64 rng(3);
  const auto gt = RandomSequence(rng, 10, 3);
  auto shifted = gt;
  for (Pose& p : shifted) p.array() += 12.5;
  EXPECT_NEAR(Mpjae(shifted, gt, 25.0), 0.0, 1e-6);
}

TEST(Mpjje, ConstantAccelerationVanishes) {
  const auto a = Polynomial(10, 3, 1.0, 2.0, 3.0);
  const auto b = Polynomial(10, 3, 5.0, -1.0, 0.5);
  EXPECT_NEAR(Mpjje(a, b, 25.0), 0.0, 1e-6);
  EXPECT_EQ(Mpjje(a, a, 25.0), 0.0);
}

TEST(Metrics, Errors) {
  std::mt19937_64 rng(4);
  const auto a = RandomSequence(rng, 5, 3);
  const auto b = RandomSequence(rng, 4, 3);
  EXPECT_THROW(Mpjpe(a, b), Error);
  const std::vector<Pose> two(a.begin(), a.begin() + 2);
  EXPECT_THROW(Mpjae(two, two, 25.0), Error);
  const std::vector<Pose> three(a.begin(), a.begin() + 3);
  EXPECT_THROW(Mpjje(three, three, 25.0), Error);
  auto c = a;
  c[2] = Pose::Zero(3, 2);
  EXPECT_THROW(Mpjpe(a, c), Error);
}

TEST(Evaluate, ReportMatchesFunctions) {
  std::mt19937_64 rng(5);
  const auto a = RandomSequence(rng, 20, 4);
  const auto b = RandomSequence(rng, 20, 4);
  const MetricReport r = Evaluate(a, b, 30.0);
  EXPECT_EQ(r.frames, 20);
  EXPECT_NEAR(r.mpjpe, Mpjpe(a, b), 1e-12);
  EXPECT_NEAR(r.mpjae, Mpjae(a, b, 30.0), 1e-6);
  EXPECT_NEAR(r.mpjje, Mpjje(a, b, 30.0), 1e-6);
  ASSERT_EQ(r.mpjpe_per_joint.size(), 4u);
  double mean = 0.0;
  for (double v : r.mpjpe_per_joint) mean += v / 4.0;
  EXPECT_NEAR(mean, r.mpjpe, 1e-9);
  const std::string table = FormatReport(r, {"a", "b", "c", "d"});
  EXPECT_NE(table.find("MPJPE"), std::string::npos);
}

}  // namespace
}  // namespace vifuse
