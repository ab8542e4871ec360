// Copyright 2026 The slopeland Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small rigid-body geometry kernel: vectors, rotations, frame-labelled poses
// and the Z-Y-X (yaw, pitch, roll) Euler convention used with NED/FRD frames.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "slopeland/errors.hpp"

namespace slopeland {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

// Proper rotation matrix. Products re-orthonormalize every
// kReorthonormalizeEvery compositions to bound drift.
class Rot3 {
 public:
  static constexpr int kReorthonormalizeEvery = 100;

  Rot3() : m_(Mat3::Identity()) {}

  // Throws InvalidArgumentError unless m is orthonormal with det +1.
  static Rot3 from_matrix(const Mat3& m, double tol = 1e-9) {
    if (!m.allFinite()) throw InvalidArgumentError("rotation has non-finite entries");
    const double orth = (m * m.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (orth > tol || std::abs(m.determinant() - 1.0) > tol) {
      throw InvalidArgumentError("matrix is not a proper rotation");
    }
    Rot3 r;
    r.m_ = m;
    return r;
  }

  static Rot3 about_x(double a) { return from_angle_axis(a, Vec3::UnitX()); }
  static Rot3 about_y(double a) { return from_angle_axis(a, Vec3::UnitY()); }
  static Rot3 about_z(double a) { return from_angle_axis(a, Vec3::UnitZ()); }

  static Rot3 from_angle_axis(double angle, const Vec3& unit_axis) {
    Rot3 r;
    r.m_ = Eigen::AngleAxisd(angle, unit_axis).toRotationMatrix();
    return r;
  }

  const Mat3& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  Rot3 inverse() const {
    Rot3 r;
    r.m_ = m_.transpose();
    r.depth_ = depth_;
    return r;
  }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  Rot3 operator*(const Rot3& other) const {
    Rot3 r;
    r.m_ = m_ * other.m_;
    r.depth_ = std::max(depth_, other.depth_) + 1;
    if (r.depth_ >= kReorthonormalizeEvery) r.reorthonormalize();
    return r;
  }

  // Compositions accumulated since the last re-orthonormalization.
  int depth() const { return depth_; }

  // Gram-Schmidt on the columns.
  void reorthonormalize() {
    Vec3 c0 = m_.col(0).normalized();
    Vec3 c1 = m_.col(1) - c0.dot(m_.col(1)) * c0;
    c1.normalize();
    m_.col(0) = c0;
    m_.col(1) = c1;
    m_.col(2) = c0.cross(c1);
    depth_ = 0;
  }

  double orthonormality_error() const {
    return (m_ * m_.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  }

 private:
  Mat3 m_;
  int depth_ = 0;
};

// Pose of frame `to_frame` expressed in `from_frame`: x_from = R x_to + t.
// Composition a * b needs a.to_frame == b.from_frame.
struct Pose {
  Rot3 rotation;
  Vec3 translation = Vec3::Zero();
  std::string from_frame;
  std::string to_frame;

  static Pose identity(const std::string& frame) { return {Rot3(), Vec3::Zero(), frame, frame}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Pose inverse() const {
    Rot3 rt = rotation.inverse();
    return {rt, -(rt * translation), to_frame, from_frame};
  }
};

// Fast path without the frame-label check.
inline Pose compose_unchecked(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation, a.from_frame,
          b.to_frame};
}

inline Pose compose(const Pose& a, const Pose& b) {
  if (a.to_frame != b.from_frame) {
    throw FrameMismatchError("cannot compose pose of '" + a.to_frame + "' in '" + a.from_frame +
                             "' with pose of '" + b.to_frame + "' in '" + b.from_frame + "'");
  }
  return compose_unchecked(a, b);
}

inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

struct EulerRPY {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

inline constexpr double kGimbalMargin = 1e-9;

// R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Rot3 rpy_to_rot(const EulerRPY& e) {
  if (!std::isfinite(e.roll) || !std::isfinite(e.pitch) || !std::isfinite(e.yaw)) {
    throw InvalidArgumentError("non-finite Euler angle");
  }
  if (std::abs(std::sin(e.pitch)) >= 1.0 - kGimbalMargin) {
    throw GimbalLockError("pitch at +-pi/2 is gimbal locked");
  }
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  Mat3 m;
  m << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,  //
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,   //
      -sp, cp * sr, cp * cr;
  return Rot3::from_matrix(m, 1e-9);
}

inline EulerRPY rot_to_rpy(const Rot3& r) {
  const Mat3& m = r.matrix();
  if (std::abs(m(2, 0)) >= 1.0 - kGimbalMargin) {
    throw GimbalLockError("rotation is at gimbal lock (|R20| ~ 1)");
  }
  EulerRPY e;
  e.pitch = std::asin(-m(2, 0));
  e.roll = std::atan2(m(2, 1), m(2, 2));
  e.yaw = std::atan2(m(1, 0), m(0, 0));
  return e;
}

// World pose of the body from position and attitude.
inline Pose body_pose(const Vec3& position, const Rot3& attitude) {
  return {attitude, position, "world", "body"};
}

}  // namespace slopeland
