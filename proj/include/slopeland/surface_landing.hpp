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

// Surface plane from contact points, its heading and incline, and the
// slope-matched landing stance.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"

namespace slopeland {

enum class PlaneSource { kTwoPoint, kThreePoint };

inline const char* to_string(PlaneSource s) {
  return s == PlaneSource::kTwoPoint ? "2-point" : "3-point";
}

struct PlaneEstimate {
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = -Vec3::UnitZ();  // unit, pointing up (n_z < 0 in NED)
  double heading = 0.0;          // rad
  double incline = 0.0;          // rad, [0, pi/2]
  PlaneSource source = PlaneSource::kThreePoint;
};

// Flips a unit normal to point up. Vertical planes fall back to the sign of
// y, then x, so the result is unique.
inline Vec3 canonicalize_normal(const Vec3& n) {
  bool flip = n.z() > 0.0 || (n.z() == 0.0 && (n.y() > 0.0 || (n.y() == 0.0 && n.x() > 0.0)));
  return flip ? Vec3(-n) : n;
}

// Surface heading from the y and z normal components, two-argument form of
// arctan(n_y / n_z). Kept behind one function so the convention can change.
inline double surface_heading(const Vec3& n) { return std::atan2(n.y(), n.z()); }

// Angle between the plane normal and the upward direction -e3; sign of the
// normal does not matter.
inline double surface_incline(const Vec3& n) {
  return std::atan2(std::hypot(n.x(), n.y()), std::abs(n.z()));
}

struct HeadingIncline {
  double heading = 0.0;
  double incline = 0.0;
};

inline HeadingIncline heading_and_incline(const Vec3& n) {
  return {surface_heading(n), surface_incline(n)};
}

namespace detail {
inline PlaneEstimate make_plane(const Vec3& centroid, const Vec3& raw_normal, PlaneSource src) {
  PlaneEstimate p;
  p.centroid = centroid;
  p.normal = canonicalize_normal(raw_normal.normalized());
  const HeadingIncline hi = heading_and_incline(p.normal);
  p.heading = hi.heading;
  p.incline = hi.incline;
  p.source = src;
  return p;
}
}  // namespace detail

inline PlaneEstimate plane_from_three(const Vec3& p1, const Vec3& p2, const Vec3& p3) {
  const Vec3 r1 = p1 - p2;
  const Vec3 r2 = p1 - p3;
  const Vec3 n = r1.cross(r2);
  if (!(n.norm() > 1e-9 * r1.norm() * r2.norm()) || n.norm() == 0.0) {
    throw DegenerateGeometryError("contact points are collinear");
  }
  return detail::make_plane((p1 + p2 + p3) / 3.0, n, PlaneSource::kThreePoint);
}

// Two contacts plus the assumption that the body x-axis lies in the plane.
inline PlaneEstimate plane_from_two(const Vec3& p1, const Vec3& p2, const Vec3& body_x_world) {
  const Vec3 u = p1 - p2;
  const Vec3 n = u.cross(body_x_world);
  const double scale = u.norm() * body_x_world.norm();
  if (!(scale > 0.0) || !(n.norm() > std::sin(1e-6) * scale)) {
    throw DegenerateGeometryError("contact baseline is parallel to the body x-axis");
  }
  return detail::make_plane(0.5 * (p1 + p2), n, PlaneSource::kTwoPoint);
}

struct LandingConfig {
  double approach_clearance = 0.5;  // m above the centroid
  double descent_velocity = 0.2;    // m/s
  double max_incline = deg2rad(35.0);
  Vec3 rear_gear_offset = Vec3(-0.20, 0.0, 0.15);  // body frame
  // Preset end-effector (x, y) per arm, body frame.
  std::vector<Eigen::Vector2d> preset_xy = {Eigen::Vector2d(0.15, -0.35),
                                            Eigen::Vector2d(0.15, 0.35)};
};

struct LandingPlan {
  Vec3 approach_point = Vec3::Zero();  // world
  double target_yaw = 0.0;
  double incline = 0.0;
  std::vector<Vec3> ee_setpoints;             // body frame
  std::vector<JointConfig> joint_setpoints;   // elbow-down IK of ee_setpoints
  Vec3 rear_gear_offset = Vec3::Zero();       // body frame
  double descent_velocity = 0.0;
};

// Yaw that puts the horizontal part of the normal along body +-y, choosing
// the branch nearest the current yaw.
inline double slope_aligned_yaw(const Vec3& normal, double current_yaw) {
  if (std::hypot(normal.x(), normal.y()) < 1e-9) return current_yaw;
  const double a = std::atan2(-normal.x(), normal.y());
  const double b = wrap_angle(a + kPi);
  return std::abs(wrap_angle(a - current_yaw)) <= std::abs(wrap_angle(b - current_yaw)) ? a : b;
}

// Body-frame height that puts a point at (x, y) on the plane through the
// gear tip with the given body-frame normal (level body).
inline double stance_height(const Vec3& normal_body, const Vec3& gear, double x, double y) {
  return gear.z() - (normal_body.x() * (x - gear.x()) + normal_body.y() * (y - gear.y())) /
                        normal_body.z();
}

// arms[i] pairs with config.preset_xy[i].
inline LandingPlan landing_geometry(const PlaneEstimate& plane, const std::vector<ArmParams>& arms,
                                    const LandingConfig& config, double current_yaw = 0.0) {
  if (arms.size() != config.preset_xy.size()) {
    throw InvalidArgumentError("need one preset end-effector position per arm");
  }
  if (plane.incline > config.max_incline) {
    throw InclineTooSteepError("incline " + std::to_string(rad2deg(plane.incline)) +
                               " deg exceeds the landable maximum " +
                               std::to_string(rad2deg(config.max_incline)) + " deg");
  }
  LandingPlan plan;
  plan.incline = plane.incline;
  plan.target_yaw = slope_aligned_yaw(plane.normal, current_yaw);
  plan.approach_point = plane.centroid + config.approach_clearance * Vec3(0, 0, -1);
  plan.rear_gear_offset = config.rear_gear_offset;
  plan.descent_velocity = config.descent_velocity;

  const Vec3 n_body = Rot3::about_z(plan.target_yaw).inverse() * plane.normal;
  for (size_t i = 0; i < arms.size(); ++i) {
    const Eigen::Vector2d& xy = config.preset_xy[i];
    Vec3 sp(xy.x(), xy.y(), stance_height(n_body, config.rear_gear_offset, xy.x(), xy.y()));
    std::vector<JointConfig> sols;
    try {
      sols = inverse_kinematics(arms[i], sp);
    } catch (const UnreachableError& e) {
      throw UnreachableError("landing setpoint for arm " + std::to_string(i + 1) +
                             " is outside the workspace: " + e.what());
    }
    plan.ee_setpoints.push_back(sp);
    plan.joint_setpoints.push_back(sols.front());
  }
  return plan;
}

}  // namespace slopeland
