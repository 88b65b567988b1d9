#include "vifuse/rotation.h"

#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace vifuse {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(SolveRotation, IdenticalVectorsGiveIdentity) {
  const Rotationd r = SolveRotation(Vec3(1, 0, 0), Vec3(1, 0, 0));
  EXPECT_NEAR(r.angle(), 0.0, 1e-12);
}

TEST(SolveRotation, XToYIsQuarterTurnAboutZ) {
  const Rotationd r = SolveRotation(Vec3(1, 0, 0), Vec3(0, 1, 0));
  const Rotationd expected = Rotationd::FromAxisAngle(Vec3::UnitZ(), kPi / 2);
  EXPECT_NEAR((r.matrix() - expected.matrix()).norm(), 0.0, 1e-12);
}

TEST(SolveRotation, RandomPairsApplyAndCompare) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 u = testing::RandomUnit(rng);
    const Vec3 v = testing::RandomUnit(rng);
    const Rotationd r = SolveRotation(u, v);
    EXPECT_LT((r * u - v).norm(), 1e-7);
    // Minimal angle: the rotation angle equals the angle between the inputs.
    EXPECT_NEAR(r.angle(), AngleBetween(u, v), 1e-9);
  }
}

TEST(SolveRotation, ScaledInputsOnlyDirectionMatters) {
  const Rotationd a = SolveRotation(Vec3(2, 0, 0), Vec3(0, 0, 7));
  const Rotationd b = SolveRotation(Vec3(1, 0, 0), Vec3(0, 0, 1));
  EXPECT_NEAR((a.matrix() - b.matrix()).norm(), 0.0, 1e-12);
}

TEST(SolveRotation, AntiparallelIsHalfTurn) {
  for (const Vec3& u : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.3, -0.2, 0.9).normalized()}) {
    const Rotationd r = SolveRotation(u, Vec3(-u));
    EXPECT_NEAR(r.angle(), kPi, 1e-9);
    EXPECT_LT((r * u + u).norm(), 1e-9);
  }
}

TEST(SolveRotation, ZeroVectorThrows) {
  try {
    SolveRotation(Vec3(0, 0, 0), Vec3(1, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
  EXPECT_THROW(SolveRotation(Vec3(1, 0, 0), Vec3(1e-12, 0, 0)), Error);
}

TEST(AngleBetween, KnownValues) {
  EXPECT_NEAR(AngleBetween(Vec3(1, 0, 0), Vec3(1, 0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(AngleBetween(Vec3(1, 0, 0), Vec3(0, 0, 1)), kPi / 2, 1e-12);
  EXPECT_NEAR(AngleBetween(Vec3(1, 1, 0), Vec3(1, 0, 0)), kPi / 4, 1e-12);
  EXPECT_NEAR(AngleBetween(Vec3(1, 0, 0), Vec3(-3, 0, 0)), kPi, 1e-12);
  EXPECT_THROW(AngleBetween(Vec3(0, 0, 0), Vec3(1, 0, 0)), Error);
}

TEST(Rotation, ComposeAndRotateIdentities) {
  std::mt19937_64 rng(11);
  const Rotationd id = Rotationd::Identity();
  for (int i = 0; i < 200; ++i) {
    const Rotationd a = testing::RandomRotation(rng);
    const Rotationd b = testing::RandomRotation(rng);
    const Vec3 v = testing::RandomUnit(rng) * 250.0;
    EXPECT_LT((Compose(id, a).quaternion().coeffs() - a.quaternion().coeffs()).norm(), 1e-15);
    EXPECT_EQ(Rotate(id, v), v);
    // Matrix-product oracle.
    const Vec3 expected = a.matrix() * (b.matrix() * v);
    EXPECT_LT((Rotate(Compose(a, b), v) - expected).norm(), 1e-9);
    EXPECT_LT((Rotate(Compose(a, b), v) - Rotate(a, Rotate(b, v))).norm(), 1e-9);
    EXPECT_LT((Rotate(Inverse(a), Rotate(a, v)) - v).norm(), 1e-9);
  }
}

TEST(Rotation, CanonicalSign) {
  const Rotationd a = Rotationd::FromQuaternion(-0.5, 0.5, -0.5, 0.5);
  const Rotationd b = Rotationd::FromQuaternion(0.5, -0.5, 0.5, -0.5);
  EXPECT_TRUE(a == b);
  EXPECT_GE(a.w(), 0.0);
}

TEST(Rotation, AxisAngleAndMatrixAgree) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = testing::RandomUnit(rng);
    const double angle = std::uniform_real_distribution<double>(0.0, kPi)(rng);
    const Rotationd r = Rotationd::FromAxisAngle(axis, angle);
    const Eigen::Matrix3d m = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    EXPECT_LT((r.matrix() - m).norm(), 1e-12);
    EXPECT_NEAR(r.angle(), angle, 1e-9);
    EXPECT_LT((Rotationd::FromMatrix(m).matrix() - m).norm(), 1e-12);
  }
  EXPECT_THROW(Rotationd::FromAxisAngle(Vec3::Zero(), 1.0), Error);
  EXPECT_THROW(Rotationd::FromQuaternion(0, 0, 0, 0), Error);
}

}  // namespace
}  // namespace vifuse
