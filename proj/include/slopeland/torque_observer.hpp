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

// Momentum-based external torque observer for the vehicle body.
//
// The estimate is the residual between the measured angular momentum and the
// integral of the modelled moments (gyroscopic term and rotor moments), fed
// back through a first-order gain K:
//
//   tau(k) = K * [ I w(k) - L0 + (w(k) x I w(k) - N u(k)) dt
//                  + sum_{i<k} (w(i) x I w(i) - N u(i) - tau(i)) dt ]
//
// K = 1 /s reproduces the unity-gain form; with the default gain the
// estimate settles to a constant external torque in a few tens of ms.
// Arm momenta are neglected (light arms, quasi-static motion).

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"

namespace slopeland {

using Vec4 = Eigen::Vector4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

// Vehicle geometry and masses. Dimensions and masses are the as-built values;
// body_height is an assumed stack height used only by the box inertia model.
struct VehicleGeometry {
  double body_length = 0.352;
  double body_width = 0.110;
  double body_height = 0.100;
  double rotor_arm_length = 0.160;
  double body_mass = 1.287;
  double battery_mass = 0.828;
  int battery_count = 2;
  double link_masses[3] = {0.236, 0.304, 0.061};
  double total_mass = 4.145;

  double box_mass() const { return body_mass + battery_count * battery_mass; }
};

class BodyInertia {
 public:
  BodyInertia() : BodyInertia(box_model(VehicleGeometry{})) {}

  // Throws InvalidArgumentError unless symmetric positive definite.
  explicit BodyInertia(const Mat3& inertia) : inertia_(inertia) {
    if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidArgumentError("inertia must be finite and symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      throw InvalidArgumentError("inertia must be positive definite");
    }
  }

  // Solid box about its centre: I_xx = m (w^2 + h^2) / 12, etc.
  static BodyInertia box(double mass, double length_x, double width_y, double height_z) {
    const double k = mass / 12.0;
    Mat3 i = Mat3::Zero();
    i(0, 0) = k * (width_y * width_y + height_z * height_z);
    i(1, 1) = k * (length_x * length_x + height_z * height_z);
    i(2, 2) = k * (length_x * length_x + width_y * width_y);
    return BodyInertia(i);
  }

  // Box spanning the rotor footprint: body plus the 45 degree rotor arms on
  // each side.
  static BodyInertia box_model(const VehicleGeometry& g) {
    const double span = std::sqrt(2.0) * g.rotor_arm_length;
    return box(g.box_mass(), g.body_length + span, g.body_width + span, g.body_height);
  }

  const Mat3& matrix() const { return inertia_; }
  Vec3 operator*(const Vec3& w) const { return inertia_ * w; }

 private:
  Mat3 inertia_;
};

// Quadrotor X allocation. Rotor order: 1 front-right, 2 rear-left,
// 3 front-left, 4 rear-right; 1 and 2 spin counter-clockwise seen from above.
// Each rotor sits at the end of a 45 degree arm fixed to a body corner.
class AllocationMap {
 public:
  static constexpr double kDefaultYawCoefficient = 0.016;  // m, drag/thrust

  AllocationMap() : AllocationMap(VehicleGeometry{}, kDefaultYawCoefficient) {}

  AllocationMap(const VehicleGeometry& g, double yaw_coefficient) {
    const double arm = g.rotor_arm_length / std::sqrt(2.0);
    const double ax = g.body_length / 2.0 + arm;
    const double ay = g.body_width / 2.0 + arm;
    rotor_positions_ = {Vec3(ax, ay, 0), Vec3(-ax, -ay, 0), Vec3(ax, -ay, 0), Vec3(-ax, ay, 0)};
    const double spin[4] = {1.0, 1.0, -1.0, -1.0};
    for (int i = 0; i < 4; ++i) {
      // Thrust acts along -z (up in FRD): moment = r x (-T ez).
      const Vec3& r = rotor_positions_[i];
      moments_(0, i) = -r.y();
      moments_(1, i) = r.x();
      moments_(2, i) = spin[i] * yaw_coefficient;
    }
    full_.row(0).setOnes();
    full_.bottomRows<3>() = moments_;
    full_inverse_ = full_.inverse();
  }

  // N_O: rotor thrusts (N) to body moments (N m).
  const Mat34& moment_matrix() const { return moments_; }
  const std::array<Vec3, 4>& rotor_positions() const { return rotor_positions_; }

  Vec3 moments(const Vec4& u) const { return moments_ * u; }

  // Rotor thrusts realising a total thrust (N) and body moments exactly.
  Vec4 thrusts_for(double total_thrust, const Vec3& moments) const {
    Vec4 rhs;
    rhs << total_thrust, moments;
    return full_inverse_ * rhs;
  }

 private:
  Mat34 moments_;
  Eigen::Matrix4d full_;
  Eigen::Matrix4d full_inverse_;
  std::array<Vec3, 4> rotor_positions_;
};

struct GyroSample {
  Vec3 omega = Vec3::Zero();  // rad/s, body frame
  Vec4 u = Vec4::Zero();      // rotor thrusts, N
  double timestamp = 0.0;     // s
};

struct ObserverState {
  Vec3 tau_hat = Vec3::Zero();
  Vec3 running_sum = Vec3::Zero();       // sum of past residual increments, N m s
  Vec3 initial_momentum = Vec3::Zero();  // L(t0), zero when starting at rest
  long t_d = 0;
  double dt = 0.004;
  double gain = 20.0;  // 1/s
  double last_timestamp = -std::numeric_limits<double>::infinity();
};

inline constexpr double kDefaultObserverGain = 20.0;

inline ObserverState reset(double dt, double gain = kDefaultObserverGain,
                           const Vec3& initial_momentum = Vec3::Zero()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgumentError("observer dt must be > 0");
  if (!(gain > 0.0) || gain * dt >= 2.0) {
    throw InvalidArgumentError("observer gain must satisfy 0 < gain*dt < 2");
  }
  if (!initial_momentum.allFinite()) throw NonFiniteInputError("initial momentum not finite");
  ObserverState s;
  s.dt = dt;
  s.gain = gain;
  s.initial_momentum = initial_momentum;
  return s;
}

inline std::pair<ObserverState, Vec3> observer_step(ObserverState state, const BodyInertia& inertia,
                                                    const AllocationMap& alloc,
                                                    const GyroSample& sample) {
  if (!sample.omega.allFinite() || !sample.u.allFinite() || !std::isfinite(sample.timestamp)) {
    throw NonFiniteInputError("gyro sample has non-finite values");
  }
  if (sample.timestamp < state.last_timestamp) {
    throw InvalidArgumentError("gyro samples out of order");
  }
  const Vec3 momentum = inertia * sample.omega;
  const Vec3 model = sample.omega.cross(momentum) - alloc.moments(sample.u);
  const Vec3 tau = state.gain * (momentum - state.initial_momentum + model * state.dt +
                                 state.running_sum);
  state.running_sum += (model - tau) * state.dt;
  state.tau_hat = tau;
  state.last_timestamp = sample.timestamp;
  ++state.t_d;
  return {state, tau};
}

// Angular momentum of the arm links about the body origin, treating each link
// as a point mass at its midpoint. This is the term the observer drops; useful
// to check the quasi-static assumption on a trajectory.
inline Vec3 dropped_arm_momentum(const ArmParams& params, const double link_masses[3],
                                 const JointConfig& q, const JointVelocity& qd, double h = 1e-6) {
  auto midpoints = [&](const JointConfig& c) {
    const double s = params.side_sign();
    const Rot3 r1 = Rot3::about_x(s * c.q1);
    const Rot3 r12 = r1 * Rot3::about_y(c.q2);
    const Rot3 r123 = r12 * Rot3::about_x(s * c.q3);
    const Vec3 ez = Vec3::UnitZ();
    const Vec3 m = params.mount_offset;
    const Vec3 j2 = m + r1 * (params.L1 * ez);
    const Vec3 j3 = j2 + r12 * (params.L2 * ez);
    return std::array<Vec3, 3>{m + r1 * (0.5 * params.L1 * ez), j2 + r12 * (0.5 * params.L2 * ez),
                               j3 + r123 * (0.5 * params.L3 * ez)};
  };
  const auto now = midpoints(q);
  const auto ahead = midpoints(JointConfig::from(q.vec() + h * qd.vec()));
  Vec3 total = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec3 v = (ahead[i] - now[i]) / h;
    total += link_masses[i] * now[i].cross(v);
  }
  return total;
}

}  // namespace slopeland
