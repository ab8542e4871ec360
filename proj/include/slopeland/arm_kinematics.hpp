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

// Kinematics of one 3R arm hanging from the pivot joint.
//
// Convention (body frame, FRD):
//   * joint 1 (pivot) rotates about the body x-axis,
//   * joint 2 tilts the distal chain out of the pivot plane (about the
//     rotated y-axis),
//   * joint 3 (elbow) is parallel to joint 1 when q2 = 0,
//   * at q = 0 every link points straight down (+z).
//
//   p = m + Rx(s*q1) * (L1*ez + Ry(q2) * (L2*ez + Rx(s*q3) * L3*ez))
//
// with s = +1 for the left arm and s = -1 for the right arm, so equal joint
// angles on both arms give positions mirrored across the body xz-plane.
// Positive q1 swings either arm outward, away from the body centreline.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"

namespace slopeland {

enum class ArmSide { kLeft, kRight };

inline const char* to_string(ArmSide side) { return side == ArmSide::kLeft ? "left" : "right"; }

struct JointLimit {
  double min = -kPi;
  double max = kPi;
};

struct ArmParams {
  double L1 = 0.118;
  double L2 = 0.330;
  double L3 = 0.273;
  std::array<JointLimit, 3> joint_limits{
      JointLimit{-kPi, kPi}, JointLimit{-kPi / 2.0, kPi / 2.0}, JointLimit{-2.5, 2.5}};
  ArmSide side = ArmSide::kLeft;
  Vec3 mount_offset = Vec3::Zero();

  double reach() const { return L1 + L2 + L3; }
  double side_sign() const { return side == ArmSide::kLeft ? 1.0 : -1.0; }

  void validate() const {
    if (!(L1 > 0.0 && L2 > 0.0 && L3 > 0.0)) {
      throw InvalidArgumentError("link lengths must be positive");
    }
    for (const auto& lim : joint_limits) {
      if (!(lim.min < lim.max)) throw InvalidArgumentError("joint limit min must be < max");
    }
    if (!mount_offset.allFinite()) throw InvalidArgumentError("mount offset not finite");
  }
};

struct JointConfig {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  Vec3 vec() const { return {q1, q2, q3}; }
  static JointConfig from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  double operator[](int i) const { return i == 0 ? q1 : (i == 1 ? q2 : q3); }
};

struct JointVelocity {
  double qd1 = 0.0;
  double qd2 = 0.0;
  double qd3 = 0.0;

  Vec3 vec() const { return {qd1, qd2, qd3}; }
  static JointVelocity from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

inline std::ostream& operator<<(std::ostream& os, const JointConfig& q) {
  return os << "(" << q.q1 << ", " << q.q2 << ", " << q.q3 << ")";
}

inline bool within_limits(const ArmParams& params, const JointConfig& q, double tol = 0.0) {
  for (int i = 0; i < 3; ++i) {
    if (q[i] < params.joint_limits[i].min - tol || q[i] > params.joint_limits[i].max + tol) {
      return false;
    }
  }
  return true;
}

inline std::string ee_frame_name(ArmSide side) { return std::string("ee_") + to_string(side); }

// H^b_e: end-effector pose in the body frame.
inline Pose forward_kinematics(const ArmParams& params, const JointConfig& q) {
  const double s = params.side_sign();
  const Rot3 r1 = Rot3::about_x(s * q.q1);
  const Rot3 r2 = Rot3::about_y(q.q2);
  const Rot3 r3 = Rot3::about_x(s * q.q3);
  const Vec3 ez = Vec3::UnitZ();
  const Vec3 b = params.L2 * ez + r3 * (params.L3 * ez);
  const Vec3 c = params.L1 * ez + r2 * b;
  return {r1 * r2 * r3, params.mount_offset + r1 * c, "body", ee_frame_name(params.side)};
}

inline Vec3 ee_position(const ArmParams& params, const JointConfig& q) {
  return forward_kinematics(params, q).translation;
}

// Position of the elbow (joint 3) in the body frame.
inline Vec3 elbow_position(const ArmParams& params, const JointConfig& q) {
  const double s = params.side_sign();
  const Vec3 ez = Vec3::UnitZ();
  return params.mount_offset +
         Rot3::about_x(s * q.q1) * (params.L1 * ez + Rot3::about_y(q.q2) * (params.L2 * ez));
}

// Columns are d p / d q_i in the body frame (m/rad).
inline Mat3 jacobian(const ArmParams& params, const JointConfig& q) {
  const double s = params.side_sign();
  const Rot3 r1 = Rot3::about_x(s * q.q1);
  const Rot3 r2 = Rot3::about_y(q.q2);
  const Rot3 r3 = Rot3::about_x(s * q.q3);
  const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  const Vec3 a = params.L3 * ez;
  const Vec3 b = params.L2 * ez + r3 * a;
  const Vec3 c = params.L1 * ez + r2 * b;
  Mat3 j;
  j.col(0) = s * (r1 * ex.cross(c));
  j.col(1) = r1 * (r2 * ey.cross(b));
  j.col(2) = s * (r1 * (r2 * (r3 * ex.cross(a))));
  return j;
}

inline double singularity_threshold(const ArmParams& params) { return 1e-6 * params.L2 * params.L3; }

// Solves J(q) qd = v at the given configuration.
inline JointVelocity differential_ik(const ArmParams& params, const JointConfig& q, const Vec3& v) {
  const Mat3 j = jacobian(params, q);
  const double det = j.determinant();
  if (std::abs(det) < singularity_threshold(params)) {
    throw NearSingularError("Jacobian near singular, det = " + std::to_string(det), det);
  }
  return JointVelocity::from(j.partialPivLu().solve(v));
}

struct IkSolutions {
  // Elbow-down first.
  std::vector<JointConfig> within_limits;
  std::vector<JointConfig> out_of_limits;
};

namespace detail {

inline bool same_config(const JointConfig& a, const JointConfig& b, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(wrap_angle(a[i] - b[i])) > tol) return false;
  }
  return true;
}

// A few Newton steps on the position residual; keeps the input if they do
// not help.
inline JointConfig polish_ik(const ArmParams& params, JointConfig q, const Vec3& target) {
  double err = (ee_position(params, q) - target).norm();
  for (int it = 0; it < 4 && err > 1e-15; ++it) {
    const Mat3 j = jacobian(params, q);
    if (std::abs(j.determinant()) < 1e-12) break;
    const Vec3 dq = j.partialPivLu().solve(target - ee_position(params, q));
    JointConfig next = JointConfig::from(q.vec() + dq);
    const double next_err = (ee_position(params, next) - target).norm();
    if (!(next_err < err)) break;
    q = next;
    err = next_err;
  }
  return q;
}

}  // namespace detail

// Every position-IK branch for a body-frame target, split by joint limits.
// Throws UnreachableError when no branch reaches the target.
inline IkSolutions solve_ik(const ArmParams& params, const Vec3& target) {
  const double s = params.side_sign();
  const double L1 = params.L1, L2 = params.L2, L3 = params.L3;
  const Vec3 d = target - params.mount_offset;
  const double dist = d.norm();
  constexpr double kTol = 1e-9;
  if (!d.allFinite()) throw InvalidArgumentError("IK target not finite");
  if (dist > params.reach() + kTol) {
    throw UnreachableError("target at " + std::to_string(dist) + " m is beyond reach " +
                           std::to_string(params.reach()) + " m");
  }

  // Distance constraint reduces to a quadratic in x = cos(elbow angle):
  //   (K - 2 L2 L3 x)^2 = 4 L1^2 ((L2 + L3 x)^2 - dx^2)
  const double k = d.squaredNorm() - L1 * L1 - L2 * L2 - L3 * L3;
  const double dx = d.x();
  const double qa = 4.0 * L3 * L3 * (L2 * L2 - L1 * L1);
  const double qb = -4.0 * L2 * L3 * (k + 2.0 * L1 * L1);
  const double qc = k * k - 4.0 * L1 * L1 * (L2 * L2 - dx * dx);

  std::vector<double> roots;
  const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc), 1e-300});
  if (std::abs(qa) < 1e-14 * scale) {
    if (std::abs(qb) > 0.0) roots.push_back(-qc / qb);
  } else {
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0 && disc > -1e-10 * qb * qb) disc = 0.0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double t = -0.5 * (qb + std::copysign(sq, qb));
      if (t != 0.0) {
        roots.push_back(t / qa);
        roots.push_back(qc / t);
      } else {
        roots.push_back(-qb / (2.0 * qa));
      }
    }
  }

  std::vector<JointConfig> candidates;
  for (double x : roots) {
    if (!std::isfinite(x) || x < -1.0 - 1e-7 || x > 1.0 + 1e-7) continue;
    x = std::clamp(x, -1.0, 1.0);
    const double phi0 = std::acos(x);
    for (double phi : {phi0, -phi0}) {
      const double bz = L2 + L3 * std::cos(phi);
      if (std::abs(bz) < 1e-12) continue;
      const double by = -L3 * std::sin(phi);
      const double q2 = std::atan2(dx / bz, (k - 2.0 * L2 * L3 * x) / (2.0 * L1 * bz));
      const double cy = by;
      const double cz = L1 + std::cos(q2) * bz;
      const double theta = std::atan2(d.z(), d.y()) - std::atan2(cz, cy);
      JointConfig q{wrap_angle(s * theta), q2, wrap_angle(s * phi)};
      if ((ee_position(params, q) - target).norm() > 1e-6) continue;
      q = detail::polish_ik(params, q, target);
      q = {wrap_angle(q.q1), wrap_angle(q.q2), wrap_angle(q.q3)};
      if ((ee_position(params, q) - target).norm() > kTol) continue;
      const bool dup = std::any_of(candidates.begin(), candidates.end(), [&](const JointConfig& o) {
        return detail::same_config(o, q, 1e-9);
      });
      if (!dup) candidates.push_back(q);
    }
  }
  if (candidates.empty()) {
    throw UnreachableError("no IK branch reaches the target (distance " + std::to_string(dist) +
                           " m)");
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const JointConfig& a, const JointConfig& b) {
                     return elbow_position(params, a).z() > elbow_position(params, b).z();
                   });
  IkSolutions out;
  for (const auto& q : candidates) {
    (within_limits(params, q) ? out.within_limits : out.out_of_limits).push_back(q);
  }
  return out;
}

// In-limit IK branches, elbow-down first. Throws UnreachableError if none.
inline std::vector<JointConfig> inverse_kinematics(const ArmParams& params, const Vec3& target) {
  IkSolutions sol = solve_ik(params, target);
  if (sol.within_limits.empty()) {
    throw UnreachableError("target reachable only outside the joint limits");
  }
  return std::move(sol.within_limits);
}

struct WorkspacePoint {
  JointConfig q;
  Vec3 p;
};

struct WorkspaceCloud {
  std::vector<WorkspacePoint> points;
  std::vector<Eigen::Vector2d> yz_outline;  // convex outline, (y, z)
  std::vector<Eigen::Vector2d> xz_outline;  // convex outline, (x, z)
};

// Andrew's monotone chain; counter-clockwise, no repeated endpoint.
inline std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

// resolution^3 forward-kinematics samples spread evenly over the joint limits.
inline WorkspaceCloud sample_workspace(const ArmParams& params, int resolution) {
  if (resolution < 2) throw InvalidArgumentError("workspace resolution must be >= 2");
  params.validate();
  auto grid = [&](int joint, int i) {
    const auto& lim = params.joint_limits[joint];
    return lim.min + (lim.max - lim.min) * static_cast<double>(i) / (resolution - 1);
  };
  WorkspaceCloud cloud;
  cloud.points.reserve(static_cast<size_t>(resolution) * resolution * resolution);
  std::vector<Eigen::Vector2d> yz, xz;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      for (int k = 0; k < resolution; ++k) {
        JointConfig q{grid(0, i), grid(1, j), grid(2, k)};
        Vec3 p = ee_position(params, q);
        cloud.points.push_back({q, p});
        yz.emplace_back(p.y(), p.z());
        xz.emplace_back(p.x(), p.z());
      }
    }
  }
  cloud.yz_outline = convex_hull_2d(std::move(yz));
  cloud.xz_outline = convex_hull_2d(std::move(xz));
  return cloud;
}

}  // namespace slopeland
