#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vifuse/error.h"

namespace vifuse {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

// Unit quaternion rotation with canonical sign (w >= 0). Every constructor
// and operation renormalizes, so values stay on the unit sphere.
template <typename Scalar>
class Rotation {
 public:
  using Quaternion = Eigen::Quaternion<Scalar>;
  using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

  Rotation() : q_(Quaternion::Identity()) {}

  static Rotation Identity() { return Rotation(); }

  static Rotation FromQuaternion(Scalar w, Scalar x, Scalar y, Scalar z) {
    return Rotation(Quaternion(w, x, y, z));
  }

  static Rotation FromQuaternion(const Quaternion& q) { return Rotation(q); }

  static Rotation FromAxisAngle(const Vector3<Scalar>& axis, Scalar angle) {
    const Scalar n = axis.norm();
    if (!(n > Scalar(0))) {
      throw Error(ErrorCode::kZeroVector, "rotation axis has zero length");
    }
    return Rotation(Quaternion(Eigen::AngleAxis<Scalar>(angle, axis / n)));
  }

  static Rotation FromMatrix(const Matrix3& m) { return Rotation(Quaternion(m)); }

  const Quaternion& quaternion() const { return q_; }
  Scalar w() const { return q_.w(); }
  Scalar x() const { return q_.x(); }
  Scalar y() const { return q_.y(); }
  Scalar z() const { return q_.z(); }

  Matrix3 matrix() const { return q_.toRotationMatrix(); }

  // Rotation angle in [0, pi].
  Scalar angle() const {
    return Scalar(2) * std::atan2(q_.vec().norm(), std::abs(q_.w()));
  }

  Rotation inverse() const { return Rotation(q_.conjugate()); }

  Rotation operator*(const Rotation& other) const { return Rotation(q_ * other.q_); }

  Vector3<Scalar> operator*(const Vector3<Scalar>& v) const {
    return q_._transformVector(v);
  }

  bool operator==(const Rotation& other) const {
    return q_.coeffs() == other.q_.coeffs();
  }

 private:
  explicit Rotation(const Quaternion& q) : q_(q) {
    const Scalar n = q_.norm();
    if (!(n > Scalar(0)) || !std::isfinite(n)) {
      throw Error(ErrorCode::kZeroVector, "quaternion has zero or non-finite norm");
    }
    q_.coeffs() /= n;
    Canonicalize();
  }

  void Canonicalize() {
    bool flip = q_.w() < Scalar(0);
    if (q_.w() == Scalar(0)) {
      // Tie-break on the first nonzero vector component.
      for (int i = 0; i < 3; ++i) {
        if (q_.vec()[i] != Scalar(0)) {
          flip = q_.vec()[i] < Scalar(0);
          break;
        }
      }
    }
    if (flip) q_.coeffs() = -q_.coeffs();
  }

  Quaternion q_;
};

using Rotationd = Rotation<double>;
using Vec3 = Eigen::Vector3d;

template <typename Scalar>
Rotation<Scalar> Compose(const Rotation<Scalar>& a, const Rotation<Scalar>& b) {
  return a * b;
}

template <typename Scalar>
Rotation<Scalar> Inverse(const Rotation<Scalar>& a) {
  return a.inverse();
}

template <typename Scalar>
Vector3<Scalar> Rotate(const Rotation<Scalar>& r, const Vector3<Scalar>& v) {
  return r * v;
}

namespace internal {

template <typename Scalar>
Vector3<Scalar> CheckedNormalize(const Vector3<Scalar>& v) {
  const Scalar n = v.norm();
  if (!(n > Scalar(1e-9))) {
    throw Error(ErrorCode::kZeroVector, "vector norm below 1e-9");
  }
  return v / n;
}

}  // namespace internal

// Angle in [0, pi] between two nonzero vectors.
template <typename Scalar>
Scalar AngleBetween(const Vector3<Scalar>& a, const Vector3<Scalar>& b) {
  const Vector3<Scalar> ua = internal::CheckedNormalize(a);
  const Vector3<Scalar> ub = internal::CheckedNormalize(b);
  return std::acos(std::clamp(ua.dot(ub), Scalar(-1), Scalar(1)));
}

// Minimal-angle rotation taking the direction of `from` onto the direction of
// `to`. The rotation axis is the normalized cross product, so there is no twist
// about either vector. Antiparallel inputs get a half turn about the component
// of +x (or +y when +x is nearly parallel) orthogonal to `from`.
template <typename Scalar>
Rotation<Scalar> SolveRotation(const Vector3<Scalar>& from, const Vector3<Scalar>& to) {
  const Vector3<Scalar> u = internal::CheckedNormalize(from);
  const Vector3<Scalar> v = internal::CheckedNormalize(to);
  const Vector3<Scalar> axis = u.cross(v);
  // 1 + cos(angle) evaluated as |u + v|^2 / 2 stays accurate near antiparallel.
  const Scalar w = (u + v).squaredNorm() / Scalar(2);
  if (axis.norm() < Scalar(1e-12) && u.dot(v) < Scalar(0)) {
    Vector3<Scalar> ortho = Vector3<Scalar>::UnitX() - u.x() * u;
    if (ortho.norm() < Scalar(1e-6)) {
      ortho = Vector3<Scalar>::UnitY() - u.y() * u;
    }
    ortho.normalize();
    return Rotation<Scalar>::FromQuaternion(Scalar(0), ortho.x(), ortho.y(), ortho.z());
  }
  return Rotation<Scalar>::FromQuaternion(w, axis.x(), axis.y(), axis.z());
}

}  // namespace vifuse
