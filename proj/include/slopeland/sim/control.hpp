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

// Flight control for the simulated vehicle: a geometric attitude PID with
// optional external-torque feedforward, and a saturated position loop that
// produces velocity commands for the quasi-static translation model.

#pragma once

#include <algorithm>

#include "slopeland/se3.hpp"
#include "slopeland/sim/config.hpp"
#include "slopeland/sim/plant.hpp"
#include "slopeland/torque_observer.hpp"

namespace slopeland::sim {

inline Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

class AttitudeController {
 public:
  AttitudeController(const BodyInertia& inertia, const ControlConfig& config, double dt)
      : inertia_(inertia), dt_(dt), feedforward_(config.disturbance_feedforward != 0) {
    const double w = config.attitude_bandwidth;
    const Vec3 diag = inertia.matrix().diagonal();
    kp_ = diag * w * w;
    kd_ = diag * 2.0 * config.damping_ratio * w;
    ki_ = diag * config.integral_ratio * w * w * w;
  }

  // Body moment driving `attitude` to `desired`.
  Vec3 moment(const Rot3& attitude, const Rot3& desired, const Vec3& omega, const Vec3& tau_hat) {
    const Mat3 r = attitude.matrix(), rd = desired.matrix();
    const Vec3 e = 0.5 * vee(rd.transpose() * r - r.transpose() * rd);
    integral_ = (integral_ + e * dt_).cwiseMax(-kIntegralLimit).cwiseMin(kIntegralLimit);
    Vec3 m = -kp_.cwiseProduct(e) - kd_.cwiseProduct(omega) - ki_.cwiseProduct(integral_) +
             omega.cross(inertia_ * omega);
    if (feedforward_) m -= tau_hat;
    return m;
  }

 private:
  static constexpr double kIntegralLimit = 0.5;  // rad s
  BodyInertia inertia_;
  double dt_;
  bool feedforward_;
  Vec3 kp_, kd_, ki_;
  Vec3 integral_ = Vec3::Zero();
};

// Hover-thrust allocation of a body moment, clamped to the rotor range.
inline Vec4 allocate(const AllocationMap& alloc, double mass, double thrust_to_weight,
                     const Vec3& moment) {
  const double hover = mass * kGravity;
  const double max_rotor = thrust_to_weight * hover / 4.0;
  return alloc.thrusts_for(hover, moment).cwiseMax(0.0).cwiseMin(max_rotor);
}

inline Vec3 velocity_toward(const Vec3& position, const Vec3& target, double gain,
                            double max_speed) {
  Vec3 v = gain * (target - position);
  const double n = v.norm();
  if (n > max_speed) v *= max_speed / n;
  return v;
}

}  // namespace slopeland::sim
