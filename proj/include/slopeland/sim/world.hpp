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

// Slanted-plane world and the penalty contact model.

#pragma once

#include <algorithm>
#include <cmath>

#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"
#include "slopeland/sim/config.hpp"

namespace slopeland::sim {

struct WorldPlane {
  Vec3 true_normal = Vec3(0, 0, -1);  // unit, n_z < 0 (up in NED)
  Vec3 true_centroid = Vec3::Zero();
  double half_extent = 2.0;  // m, square patch around the centroid, measured in-plane
  double incline_deg = 0.0;

  // Plane whose surface descends along the horizontal direction `azimuth`.
  static WorldPlane inclined(double incline_deg, double azimuth_deg = 90.0,
                             const Vec3& centroid = Vec3::Zero(), double half_extent = 2.0) {
    if (!(incline_deg >= 0.0 && incline_deg <= 45.0)) {
      throw InvalidArgumentError("world incline must be within [0, 45] deg");
    }
    const double a = deg2rad(incline_deg), az = deg2rad(azimuth_deg);
    WorldPlane w;
    w.true_normal = Vec3(std::sin(a) * std::cos(az), std::sin(a) * std::sin(az), -std::cos(a));
    w.true_centroid = centroid;
    w.half_extent = half_extent;
    w.incline_deg = incline_deg;
    return w;
  }

  static WorldPlane from_config(const WorldConfig& c) {
    return inclined(c.incline_deg, c.slope_azimuth_deg, c.centroid, c.half_extent);
  }

  // Positive above the surface.
  double signed_distance(const Vec3& p) const { return true_normal.dot(p - true_centroid); }

  bool within_extent(const Vec3& p) const {
    const Vec3 d = p - true_centroid;
    const Vec3 in_plane = d - true_normal * true_normal.dot(d);
    Vec3 a = true_normal.cross(Vec3::UnitX());
    if (a.norm() < 1e-9) a = true_normal.cross(Vec3::UnitY());
    a.normalize();
    const Vec3 b = true_normal.cross(a);
    return std::abs(a.dot(in_plane)) <= half_extent && std::abs(b.dot(in_plane)) <= half_extent;
  }

  // World z of the surface under (x, y).
  double height_at(double x, double y) const {
    const Vec3& n = true_normal;
    const Vec3& c = true_centroid;
    return c.z() - (n.x() * (x - c.x()) + n.y() * (y - c.y())) / n.z();
  }
};

struct ContactParams {
  double stiffness = 2000.0;  // N/m
  double damping = 10.0;      // N s/m
};

struct TipContact {
  bool in_contact = false;
  double penetration = 0.0;  // m, > 0 below the surface
  double normal_force = 0.0;  // N
  Vec3 force_world = Vec3::Zero();
  Vec3 torque_body = Vec3::Zero();
};

// Spring-damper normal force on a point below the surface. The force acts
// along the true normal and never pulls; `lever_body` is the point relative
// to the body origin, used for the body torque.
inline TipContact contact_model(const Vec3& point_world, const Vec3& velocity_world,
                                const WorldPlane& world, const ContactParams& params,
                                const Vec3& lever_body = Vec3::Zero(),
                                const Rot3& body_rotation = Rot3()) {
  TipContact c;
  const double depth = -world.signed_distance(point_world);
  if (!(depth > 0.0) || !world.within_extent(point_world)) return c;
  const double rate = -world.true_normal.dot(velocity_world);
  const double f = std::max(0.0, params.stiffness * depth + params.damping * rate);
  c.in_contact = true;
  c.penetration = depth;
  c.normal_force = f;
  c.force_world = f * world.true_normal;
  c.torque_body = lever_body.cross(body_rotation.inverse() * c.force_world);
  return c;
}

}  // namespace slopeland::sim
