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

// Vehicle plant: quasi-static translation, rigid-body rotation, kinematic
// arms, and penalty contacts at the arm tips and the rear landing gear.

#pragma once

#include <array>
#include <string>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"
#include "slopeland/sim/world.hpp"
#include "slopeland/torque_observer.hpp"

namespace slopeland::sim {

inline constexpr double kGravity = 9.81;  // m/s^2

enum class Phase { kApproach, kProbe, kRaiseArm, kReposition, kPlanLanding, kDescend, kLanded, kAborted };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::kApproach: return "Approach";
    case Phase::kProbe: return "Probe";
    case Phase::kRaiseArm: return "RaiseArm";
    case Phase::kReposition: return "Reposition";
    case Phase::kPlanLanding: return "PlanLanding";
    case Phase::kDescend: return "Descend";
    case Phase::kLanded: return "Landed";
    case Phase::kAborted: return "Aborted";
  }
  return "?";
}

inline Phase phase_from_string(std::string_view s) {
  for (Phase p : {Phase::kApproach, Phase::kProbe, Phase::kRaiseArm, Phase::kReposition,
                  Phase::kPlanLanding, Phase::kDescend, Phase::kLanded, Phase::kAborted}) {
    if (s == to_string(p)) return p;
  }
  throw InvalidArgumentError("unknown phase '" + std::string(s) + "'");
}

// Edges of the landing pipeline graph. Any non-terminal phase may abort.
inline bool legal_transition(Phase from, Phase to) {
  if (from == Phase::kLanded || from == Phase::kAborted) return false;
  if (to == Phase::kAborted) return true;
  switch (from) {
    case Phase::kApproach: return to == Phase::kProbe;
    case Phase::kProbe: return to == Phase::kRaiseArm || to == Phase::kReposition;
    case Phase::kRaiseArm:
      return to == Phase::kProbe || to == Phase::kReposition || to == Phase::kPlanLanding;
    case Phase::kReposition: return to == Phase::kProbe;
    case Phase::kPlanLanding: return to == Phase::kDescend;
    case Phase::kDescend: return to == Phase::kLanded;
    default: return false;
  }
}

inline constexpr int kArmCount = 2;

struct VehicleState {
  double t = 0.0;
  Vec3 p_b = Vec3::Zero();  // world, m
  Vec3 v_b = Vec3::Zero();  // world, m/s
  Rot3 R_b;
  Vec3 omega = Vec3::Zero();  // body, rad/s
  std::array<JointConfig, kArmCount> q{};
  std::array<JointVelocity, kArmCount> qd{};
  Phase phase = Phase::kApproach;
};

struct PlantInputs {
  Vec3 v_cmd = Vec3::Zero();  // world, m/s
  Vec4 u = Vec4::Zero();      // rotor thrusts, N
  std::array<JointVelocity, kArmCount> qd{};
  Vec3 tau_injected = Vec3::Zero();  // extra external body torque, N m
};

struct PlantModel {
  BodyInertia inertia;
  AllocationMap alloc;
  double mass = 4.145;
  double velocity_lag = 0.1;
  std::array<ArmParams, kArmCount> arms{};
  Vec3 gear = Vec3(-0.20, 0.0, 0.15);  // body frame
  ContactParams contact;
  int substeps = 1;
};

// Ground-truth contact state of the last substep plus per-step flags.
struct ContactReport {
  std::array<TipContact, kArmCount> tips{};
  TipContact gear;
  std::array<bool, kArmCount> tip_touched{};  // any substep this step
  bool gear_touched = false;
  Vec3 torque_body = Vec3::Zero();
  Vec3 force_world = Vec3::Zero();
};

inline ContactReport evaluate_contacts(const VehicleState& s, const PlantModel& m,
                                       const WorldPlane& world) {
  ContactReport r;
  auto point = [&](const Vec3& lever, const Vec3& rel_velocity_body) {
    const Vec3 p = s.p_b + s.R_b * lever;
    const Vec3 v = s.v_b + s.R_b * (s.omega.cross(lever) + rel_velocity_body);
    return contact_model(p, v, world, m.contact, lever, s.R_b);
  };
  for (int i = 0; i < kArmCount; ++i) {
    const Vec3 ee = ee_position(m.arms[i], s.q[i]);
    const Vec3 ee_rate = jacobian(m.arms[i], s.q[i]) * s.qd[i].vec();
    r.tips[i] = point(ee, ee_rate);
    r.tip_touched[i] = r.tips[i].in_contact;
    r.torque_body += r.tips[i].torque_body;
    r.force_world += r.tips[i].force_world;
  }
  r.gear = point(m.gear, Vec3::Zero());
  r.gear_touched = r.gear.in_contact;
  r.torque_body += r.gear.torque_body;
  r.force_world += r.gear.force_world;
  return r;
}

// Backward Euler step of I w' = moment - w x I w.
inline Vec3 rotation_step(const Mat3& inertia, const Vec3& omega, const Vec3& moment, double h) {
  const Vec3 rhs = inertia * omega + h * moment;
  Vec3 w = omega;
  for (int it = 0; it < 20; ++it) {
    const Vec3 iw = inertia * w;
    const Vec3 f = iw + h * w.cross(iw) - rhs;
    if (f.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) break;
    auto skew = [](const Vec3& v) {
      Mat3 s;
      s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
      return s;
    };
    const Mat3 jac = inertia + h * (skew(w) * inertia - skew(iw));
    w -= jac.lu().solve(f);
  }
  return w;
}

// Advances one control step of length dt, split into model.substeps
// substeps with inputs held. Contacts are re-evaluated every substep.
inline VehicleState step_plant(const VehicleState& state, const PlantInputs& in,
                               const WorldPlane& world, double dt, const PlantModel& model,
                               ContactReport* contacts = nullptr) {
  VehicleState s = state;
  s.qd = in.qd;
  const double h = dt / model.substeps;
  const Vec3 thrust_moment = model.alloc.moments(in.u);
  ContactReport last;
  std::array<bool, kArmCount> touched{};
  bool gear_touched = false;
  for (int k = 0; k < model.substeps; ++k) {
    last = evaluate_contacts(s, model, world);
    for (int i = 0; i < kArmCount; ++i) touched[i] = touched[i] || last.tip_touched[i];
    gear_touched = gear_touched || last.gear_touched;

    const Vec3 moment = thrust_moment + in.tau_injected + last.torque_body;
    s.omega = rotation_step(model.inertia.matrix(), s.omega, moment, h);
    const double angle = s.omega.norm() * h;
    if (angle > 0.0) s.R_b = s.R_b * Rot3::from_angle_axis(angle, s.omega.normalized());

    const double lag = model.velocity_lag;
    s.v_b = (s.v_b + h * (in.v_cmd / lag + last.force_world / model.mass)) / (1.0 + h / lag);
    s.p_b += h * s.v_b;

    for (int i = 0; i < kArmCount; ++i) s.q[i] = JointConfig::from(s.q[i].vec() + h * s.qd[i].vec());
  }
  s.t = state.t + dt;
  if (contacts) {
    *contacts = evaluate_contacts(s, model, world);
    contacts->tip_touched = touched;
    contacts->gear_touched = gear_touched;
  }
  return s;
}

inline double kinetic_energy(const VehicleState& s, const PlantModel& m) {
  return 0.5 * s.omega.dot(m.inertia * s.omega);
}

}  // namespace slopeland::sim
