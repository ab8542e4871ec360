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

// Closed-loop landing pipeline on the simulated vehicle:
//
//   Approach -> Probe -> RaiseArm -> (Probe | Reposition)* -> PlanLanding
//            -> Descend -> Landed
//
// with Aborted reachable from any active phase.

#pragma once

#include <array>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/contact_pipeline.hpp"
#include "slopeland/sim/config.hpp"
#include "slopeland/sim/control.hpp"
#include "slopeland/sim/estimator.hpp"
#include "slopeland/sim/plant.hpp"
#include "slopeland/sim/telemetry.hpp"
#include "slopeland/sim/world.hpp"
#include "slopeland/surface_landing.hpp"

namespace slopeland::sim {

struct StanceMetrics {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  // Signed distance to the true plane (m, negative below): gear, arm 1, arm 2.
  std::array<double, 3> distance{};
};

struct RunReport {
  ScenarioConfig config;
  Phase outcome = Phase::kAborted;
  std::string reason;
  double incline_true_deg = 0.0;
  std::optional<PlaneEstimate> plane;
  std::optional<LandingPlan> plan;
  std::vector<ContactEvent> events;
  std::vector<int> truth_arms;  // ground-truth touching arm per event, 0 if none
  std::vector<std::pair<double, Phase>> timeline;
  std::vector<TelemetryRow> telemetry;
  std::optional<StanceMetrics> stance;
  std::vector<std::string> warnings;
  double sim_time = 0.0;
  bool replayed = false;
  bool partial = false;  // replay of a truncated log

  bool has_estimate() const { return plane.has_value(); }
  double incline_est_deg() const { return plane ? rad2deg(plane->incline) : 0.0; }
  double error_deg() const { return incline_est_deg() - incline_true_deg; }  // estimated - true
  double heading_deg() const { return plane ? rad2deg(plane->heading) : 0.0; }
};

inline PlantModel plant_model(const ScenarioConfig& c) {
  PlantModel m;
  const BodyInertia nominal = BodyInertia::box_model(c.vehicle.geometry);
  m.inertia = BodyInertia(nominal.matrix() * (1.0 + c.vehicle.inertia_mismatch));
  m.alloc = AllocationMap(c.vehicle.geometry, c.vehicle.yaw_coefficient);
  m.mass = c.vehicle.geometry.total_mass;
  m.velocity_lag = c.vehicle.velocity_lag;
  for (int i = 0; i < kArmCount; ++i) m.arms[i] = c.arm_params(i);
  m.gear = c.landing.gear;
  m.contact = {c.contact.stiffness, c.contact.damping};
  m.substeps = c.substeps;
  return m;
}

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& config)
      : cfg_(checked(config)),
        world_(WorldPlane::from_config(cfg_.world)),
        model_(plant_model(cfg_)),
        nominal_inertia_(BodyInertia::box_model(cfg_.vehicle.geometry)),
        estimator_(EstimatorSetup::from_config(cfg_)),
        controller_(nominal_inertia_, cfg_.control, cfg_.dt),
        rng_(cfg_.sensor.seed) {
    probe_dir_ = cfg_.probe.direction.normalized();
    state_.p_b = cfg_.vehicle.start;
    state_.R_b = Rot3::about_z(deg2rad(cfg_.vehicle.start_yaw_deg));
    yaw_target_ = deg2rad(cfg_.vehicle.start_yaw_deg);
    last_.p = state_.p_b;
    last_.rpy = rot_to_rpy(state_.R_b);
    report_.config = cfg_;
    report_.incline_true_deg = world_.incline_deg;
    report_.timeline.push_back({0.0, Phase::kApproach});
    for (int i = 0; i < kArmCount; ++i) {
      try {
        start_q_[i] = start_config(i, 0.0);
      } catch (const UnreachableError& e) {
        abort(std::string("probe start pose unreachable: ") + e.what());
        return;
      }
    }
    enter_approach();
  }

  bool finished() const { return phase_ == Phase::kLanded || phase_ == Phase::kAborted; }
  Phase phase() const { return phase_; }
  const VehicleState& state() const { return state_; }
  const WorldPlane& world() const { return world_; }
  const ContactReport& contacts() const { return contacts_; }
  const RunReport& report() const { return report_; }

  // One control step. Returns false once the run has finished.
  bool step() {
    if (finished()) return false;
    const double dt = cfg_.dt;

    PlantInputs in;
    for (int i = 0; i < kArmCount; ++i) in.qd[i] = arm_rate(i);
    in.v_cmd = velocity_command();
    const Rot3 desired = Rot3::about_z(yaw_target_);
    const Vec3 m = controller_.moment(rpy_to_rot(last_.rpy), desired, last_.omega, last_.tau_hat);
    in.u = allocate(model_.alloc, model_.mass, cfg_.vehicle.max_thrust_to_weight, m);

    state_ = step_plant(state_, in, world_, dt, model_, &contacts_);
    ++steps_;
    state_.t = steps_ * dt;

    TelemetryRow row;
    row.t = state_.t;
    Vec3 gyro_noise, pos_noise;
    for (int k = 0; k < 3; ++k) gyro_noise[k] = normal_(rng_);
    for (int k = 0; k < 3; ++k) pos_noise[k] = normal_(rng_);
    row.p = state_.p_b + cfg_.sensor.position_noise_sigma * pos_noise;
    try {
      row.rpy = rot_to_rpy(state_.R_b);
    } catch (const GimbalLockError&) {
      abort("attitude lost (pitch at +-90 deg)");
      return false;
    }
    row.omega = state_.omega + cfg_.sensor.gyro_bias + cfg_.sensor.gyro_noise_sigma * gyro_noise;
    row.u = in.u;
    row.q = state_.q;
    row.qd = in.qd;
    row.phase = phase_;

    const EstimatorStep est = estimator_.process(row);
    row.tau_hat = est.tau_hat;
    if (est.event) {
      row.event_flag = 1;
      row.event_arm = est.event->arm_id;
      report_.events.push_back(*est.event);
      report_.truth_arms.push_back(touching_arm());
    }
    report_.telemetry.push_back(row);
    last_ = row;

    advance(est.event);
    if (!finished() && state_.t >= cfg_.max_sim_time) abort("timeout");
    return !finished();
  }

  RunReport run() {
    while (step()) {
    }
    return finish();
  }

  RunReport finish() {
    report_.outcome = phase_;
    report_.sim_time = state_.t;
    report_.warnings = estimator_.warnings();
    for (const std::string& w : local_warnings_) report_.warnings.push_back(w);
    return report_;
  }

 private:
  enum class ArmMode { kHold, kProbe, kJointMove, kCompliant };
  struct ArmTask {
    ArmMode mode = ArmMode::kHold;
    JointConfig target;
    double speed = 0.0;
    double travel = 0.0;
    bool exhausted = false;
    bool raised = false;
  };

  static ScenarioConfig checked(const ScenarioConfig& c) {
    validate(c);
    return c;
  }

  JointConfig start_config(int arm, double dx) const {
    const Vec3& s = cfg_.probe.start;
    const Vec3 target(s.x() + dx, arm == 0 ? -s.y() : s.y(), s.z());
    return inverse_kinematics(model_.arms[arm], target).front();
  }

  // --- commands -----------------------------------------------------------

  JointVelocity arm_rate(int i) {
    ArmTask& task = arms_[i];
    const JointConfig& q = state_.q[i];
    const double dt = cfg_.dt;
    switch (task.mode) {
      case ArmMode::kHold:
        return {};
      case ArmMode::kJointMove: {
        Vec3 rate = (task.target.vec() - q.vec()) / dt;
        rate = rate.cwiseMax(-task.speed).cwiseMin(task.speed);
        return JointVelocity::from(rate);
      }
      case ArmMode::kProbe: {
        if (task.exhausted) return {};
        try {
          const JointVelocity qd = differential_ik(model_.arms[i], q, probe_dir_ * cfg_.probe.speed);
          const JointConfig next = JointConfig::from(q.vec() + dt * qd.vec());
          if (!within_limits(model_.arms[i], next)) {
            task.exhausted = true;
            return {};
          }
          return qd;
        } catch (const NearSingularError&) {
          task.exhausted = true;
          return {};
        }
      }
      case ArmMode::kCompliant: {
        const LandingSimConfig& l = cfg_.landing;
        const double f = contacts_.tips[i].normal_force;
        double vz = 0.0;
        if (f > l.tip_force) {
          vz = -l.compliance_gain * (f - l.tip_force);
        } else if (gear_seen_) {
          vz = l.compliance_gain * (l.tip_force - f);
        }
        vz = std::clamp(vz, -l.max_tip_speed, l.max_tip_speed);
        if (vz == 0.0) return {};
        try {
          return differential_ik(model_.arms[i], q, Vec3(0, 0, vz));
        } catch (const NearSingularError&) {
          return {};
        }
      }
    }
    return {};
  }

  Vec3 velocity_command() const {
    const ControlConfig& c = cfg_.control;
    if (phase_ == Phase::kDescend) {
      Vec3 v = velocity_toward(last_.p, hold_target_, c.position_gain, c.max_speed);
      v.z() = cfg_.landing.descent_velocity;
      return v;
    }
    return velocity_toward(last_.p, hold_target_, c.position_gain, c.max_speed);
  }

  // --- phase logic --------------------------------------------------------

  void transition(Phase to) {
    if (!legal_transition(phase_, to)) {
      throw std::logic_error(std::string("illegal phase transition ") + to_string(phase_) +
                             " -> " + to_string(to));
    }
    phase_ = to;
    report_.timeline.push_back({state_.t, to});
  }

  void abort(const std::string& reason) {
    if (finished()) return;
    report_.reason = reason;
    if (phase_ == Phase::kAborted) return;
    transition(Phase::kAborted);
  }

  bool position_reached() const {
    return (last_.p - hold_target_).norm() < cfg_.control.position_tolerance &&
           state_.v_b.norm() < 0.05;
  }

  bool arms_settled() const {
    for (int i = 0; i < kArmCount; ++i) {
      if (arms_[i].mode == ArmMode::kJointMove &&
          (state_.q[i].vec() - arms_[i].target.vec()).cwiseAbs().maxCoeff() > 1e-9) {
        return false;
      }
    }
    return true;
  }

  void move_arm(int i, const JointConfig& target, double speed) {
    arms_[i].mode = ArmMode::kJointMove;
    arms_[i].target = target;
    arms_[i].speed = speed;
  }

  int touching_arm() const {
    int best = 0;
    for (int i = 0; i < kArmCount; ++i) {
      if (!contacts_.tip_touched[i]) continue;
      if (best == 0 || contacts_.tips[i].normal_force > contacts_.tips[best - 1].normal_force) {
        best = i + 1;
      }
    }
    return best;
  }

  void enter_approach() {
    hold_target_ = cfg_.approach.target;
    for (int i = 0; i < kArmCount; ++i) move_arm(i, start_q_[i], cfg_.probe.joint_speed);
  }

  void enter_probe(bool fresh) {
    transition(Phase::kProbe);
    for (int i = 0; i < kArmCount; ++i) {
      ArmTask& t = arms_[i];
      if (t.raised) {
        t.mode = ArmMode::kHold;
        continue;
      }
      t.mode = ArmMode::kProbe;
      if (fresh) {
        t.travel = 0.0;
        t.exhausted = false;
      }
    }
  }

  void enter_raise(int arm) {
    transition(Phase::kRaiseArm);
    for (int i = 0; i < kArmCount; ++i) arms_[i].mode = ArmMode::kHold;
    const ArmParams& p = model_.arms[arm];
    JointConfig up = state_.q[arm];
    up.q1 = std::min(up.q1 + cfg_.raise.delta_q1, p.joint_limits[0].max - 1e-3);
    move_arm(arm, up, cfg_.raise.joint_speed);
    arms_[arm].raised = true;
    hold_target_.z() -= cfg_.raise.hop;
  }

  void enter_reposition(bool step_down) {
    transition(Phase::kReposition);
    if (step_down) {
      if (++search_steps_ > cfg_.probe.max_search_steps) {
        abort("search exhausted without contact");
        return;
      }
      for (int i = 0; i < kArmCount; ++i) {
        if (arms_[i].raised) continue;
        move_arm(i, start_q_[i], cfg_.probe.joint_speed);
        arms_[i].travel = 0.0;
        arms_[i].exhausted = false;
      }
      hold_target_.z() += cfg_.probe.search_step_down;
      return;
    }
    // Third probe: the first contacted arm, shifted along x, from the
    // starting altitude.
    const int arm = report_.events.front().arm_id - 1;
    JointConfig q;
    try {
      q = start_config(arm, cfg_.probe.third_dx);
    } catch (const UnreachableError& e) {
      abort(std::string("third probe pose unreachable: ") + e.what());
      return;
    }
    start_q_[arm] = q;
    arms_[arm].raised = false;
    arms_[arm].travel = 0.0;
    arms_[arm].exhausted = false;
    move_arm(arm, q, cfg_.probe.joint_speed);
    hold_target_.z() = cfg_.approach.target.z();
  }

  void enter_plan_landing() {
    transition(Phase::kPlanLanding);
    for (int i = 0; i < kArmCount; ++i) arms_[i].mode = ArmMode::kHold;
    PlaneEstimate plane;
    try {
      plane = estimator_.plane();
    } catch (const DegenerateGeometryError& e) {
      abort(std::string("plane estimate failed: ") + e.what());
      return;
    }
    report_.plane = plane;
    std::vector<ArmParams> arms(model_.arms.begin(), model_.arms.end());
    try {
      report_.plan = landing_geometry(plane, arms, cfg_.landing.geometry(), last_.rpy.yaw);
    } catch (const InclineTooSteepError& e) {
      abort(std::string("incline too steep: ") + e.what());
      return;
    } catch (const UnreachableError& e) {
      abort(std::string("landing unreachable: ") + e.what());
      return;
    }
    hold_target_ = report_.plan->approach_point;
    yaw_target_ = report_.plan->target_yaw;
    plan_stage_ = 0;
  }

  void enter_descend() {
    transition(Phase::kDescend);
    for (int i = 0; i < kArmCount; ++i) arms_[i].mode = ArmMode::kCompliant;
    descend_start_ = state_.t;
    settle_ = 0.0;
    gear_seen_ = false;
  }

  StanceMetrics stance() const {
    StanceMetrics s;
    const EulerRPY e = rot_to_rpy(state_.R_b);
    s.roll_deg = rad2deg(e.roll);
    s.pitch_deg = rad2deg(e.pitch);
    s.distance[0] = world_.signed_distance(state_.p_b + state_.R_b * model_.gear);
    for (int i = 0; i < kArmCount; ++i) {
      const Vec3 ee = ee_position(model_.arms[i], state_.q[i]);
      s.distance[i + 1] = world_.signed_distance(state_.p_b + state_.R_b * ee);
    }
    return s;
  }

  bool stance_ok(const StanceMetrics& s) const {
    const LandingSimConfig& l = cfg_.landing;
    if (std::abs(s.roll_deg) > l.level_tolerance_deg) return false;
    if (std::abs(s.pitch_deg) > l.level_tolerance_deg) return false;
    for (double d : s.distance) {
      if (std::abs(d) > l.stance_tolerance) return false;
    }
    return true;
  }

  void advance(const std::optional<ContactEvent>& event) {
    switch (phase_) {
      case Phase::kApproach:
        if (position_reached() && arms_settled()) enter_probe(true);
        break;
      case Phase::kProbe: {
        if (event) {
          enter_raise(event->arm_id - 1);
          break;
        }
        bool all_exhausted = true;
        for (ArmTask& t : arms_) {
          if (t.mode != ArmMode::kProbe) continue;
          if (!t.exhausted) {
            t.travel += cfg_.probe.speed * cfg_.dt;
            if (t.travel >= cfg_.probe.travel) t.exhausted = true;
          }
          all_exhausted = all_exhausted && t.exhausted;
        }
        if (all_exhausted) enter_reposition(true);
        break;
      }
      case Phase::kRaiseArm:
        if (position_reached() && arms_settled()) {
          if (estimator_.plane_ready()) {
            enter_plan_landing();
          } else if (!arms_[0].raised || !arms_[1].raised) {
            enter_probe(false);
          } else {
            enter_reposition(false);
          }
        }
        break;
      case Phase::kReposition:
        if (position_reached() && arms_settled()) enter_probe(true);
        break;
      case Phase::kPlanLanding: {
        const double yaw_err = std::abs(wrap_angle(last_.rpy.yaw - yaw_target_));
        if (plan_stage_ == 0 && position_reached() && yaw_err < 0.01) {
          for (int i = 0; i < kArmCount; ++i) {
            move_arm(i, report_.plan->joint_setpoints[i], cfg_.probe.joint_speed);
          }
          plan_stage_ = 1;
        } else if (plan_stage_ == 1 && arms_settled()) {
          enter_descend();
        }
        break;
      }
      case Phase::kDescend: {
        gear_seen_ = gear_seen_ || contacts_.gear.in_contact;
        bool all = contacts_.gear.in_contact;
        for (const TipContact& t : contacts_.tips) all = all && t.in_contact;
        settle_ = all ? settle_ + cfg_.dt : 0.0;
        if (settle_ >= cfg_.landing.settle_time - 1e-12) {
          const StanceMetrics s = stance();
          if (stance_ok(s)) {
            report_.stance = s;
            transition(Phase::kLanded);
            break;
          }
        }
        if (state_.t - descend_start_ > cfg_.landing.timeout) {
          report_.stance = stance();
          abort("touchdown timeout");
        }
        break;
      }
      default:
        break;
    }
  }

  ScenarioConfig cfg_;
  WorldPlane world_;
  PlantModel model_;
  BodyInertia nominal_inertia_;
  Estimator estimator_;
  AttitudeController controller_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};

  VehicleState state_;
  ContactReport contacts_;
  TelemetryRow last_;
  long steps_ = 0;
  Phase phase_ = Phase::kApproach;
  RunReport report_;
  std::vector<std::string> local_warnings_;

  Vec3 probe_dir_ = Vec3::UnitZ();
  std::array<JointConfig, kArmCount> start_q_{};
  std::array<ArmTask, kArmCount> arms_{};
  Vec3 hold_target_ = Vec3::Zero();
  double yaw_target_ = 0.0;
  int search_steps_ = 0;
  int plan_stage_ = 0;
  double descend_start_ = 0.0;
  double settle_ = 0.0;
  bool gear_seen_ = false;
};

inline RunReport run_pipeline(const ScenarioConfig& config) { return Simulation(config).run(); }

}  // namespace slopeland::sim
