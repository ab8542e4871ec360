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

// Contact detection on the torque estimate and attribution of a detected
// contact to the arm whose motion best explains the observed torque.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"

namespace slopeland {

struct DetectionConfig {
  double threshold = 0.15;  // N m, applied to the largest absolute component
  double timeout = 0.5;     // s
  bool armed = false;

  void validate() const {
    if (!(threshold > 0.0)) throw InvalidArgumentError("detection threshold must be > 0");
    if (!(timeout > 0.0)) throw InvalidArgumentError("detection timeout must be > 0");
  }
};

inline constexpr double kNoEvent = -std::numeric_limits<double>::infinity();

inline bool detect(const Vec3& tau_hat, const DetectionConfig& config, double clock,
                   double last_event_time) {
  return config.armed && tau_hat.cwiseAbs().maxCoeff() > config.threshold &&
         clock - last_event_time > config.timeout;
}

// detect() plus the debounce memory.
class ContactDetector {
 public:
  explicit ContactDetector(DetectionConfig config = {}) : config_(config) { config_.validate(); }

  void set_armed(bool armed) { config_.armed = armed; }
  bool armed() const { return config_.armed; }
  const DetectionConfig& config() const { return config_; }
  double last_event_time() const { return last_event_time_; }

  // True when a new contact is registered at `clock`.
  bool update(const Vec3& tau_hat, double clock) {
    if (!detect(tau_hat, config_, clock, last_event_time_)) return false;
    last_event_time_ = clock;
    return true;
  }

 private:
  DetectionConfig config_;
  double last_event_time_ = kNoEvent;
};

struct ArmMotion {
  int arm_id = 1;  // 1-based
  ArmParams params;
  JointConfig q;
  JointVelocity qd;
  Vec3 ee_body = Vec3::Zero();  // forward_kinematics(params, q).translation

  static ArmMotion from_kinematics(int arm_id, const ArmParams& params, const JointConfig& q,
                                   const JointVelocity& qd) {
    return {arm_id, params, q, qd, ee_position(params, q)};
  }
};

struct ArmMotionSnapshot {
  Pose body_pose = body_pose_identity();
  std::vector<ArmMotion> arms;

  static Pose body_pose_identity() { return {Rot3(), Vec3::Zero(), "world", "body"}; }
};

struct ContactEvent {
  double time = 0.0;
  int arm_id = 0;
  Vec3 p_c_world = Vec3::Zero();
  Vec3 tau_observed = Vec3::Zero();
  double match_angle = 0.0;  // rad, in [0, pi]
};

// Unit vector opposite to the end-effector velocity J(q) qd.
inline Vec3 virtual_force(const ArmMotion& arm) {
  const Vec3 v = jacobian(arm.params, arm.q) * arm.qd.vec();
  const double speed = v.norm();
  if (!(speed > 1e-9)) {
    throw StationaryArmError("arm " + std::to_string(arm.arm_id) + " is not moving");
  }
  return -v / speed;
}

inline Vec3 virtual_torque(const Vec3& ee_body, const Vec3& force_dir) {
  const Vec3 t = ee_body.cross(force_dir);
  if (!(t.norm() > 1e-12 * std::max(ee_body.norm(), 1.0))) {
    throw DegenerateTorqueError("virtual force is parallel to the moment arm");
  }
  return t;
}

inline Vec3 virtual_torque(const ArmMotion& arm) {
  return virtual_torque(arm.ee_body, virtual_force(arm));
}

// Angle between two nonzero vectors, in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

struct ArmCandidate {
  int arm_id = 0;
  bool excluded = false;
  std::string reason;  // why the arm was excluded
  Vec3 virtual_torque = Vec3::Zero();
  double angle = 0.0;
};

struct Localization {
  ContactEvent event;
  std::vector<ArmCandidate> candidates;
  bool tie = false;
  std::vector<std::string> warnings;
};

inline constexpr double kTieTolerance = 1e-6;

// Matches tau_hat against every moving arm's virtual torque and places the
// contact at the matched end-effector in the world frame.
inline Localization localize(const Vec3& tau_hat, const ArmMotionSnapshot& snapshot,
                             double time = 0.0) {
  if (!(tau_hat.norm() > 0.0)) throw InvalidArgumentError("observed torque is zero");
  Localization out;
  int best = -1;
  for (const ArmMotion& arm : snapshot.arms) {
    ArmCandidate c;
    c.arm_id = arm.arm_id;
    try {
      c.virtual_torque = virtual_torque(arm);
      c.angle = angle_between(tau_hat, c.virtual_torque);
    } catch (const StationaryArmError& e) {
      c.excluded = true;
      c.reason = e.what();
    } catch (const DegenerateTorqueError& e) {
      c.excluded = true;
      c.reason = e.what();
    }
    out.candidates.push_back(c);
    if (c.excluded) continue;
    const int idx = static_cast<int>(out.candidates.size()) - 1;
    if (best < 0 || c.angle < out.candidates[best].angle - kTieTolerance) {
      best = idx;
    }
  }
  if (best < 0) throw NoCandidateArmError("no moving arm can explain the contact");

  const ArmCandidate& chosen = out.candidates[best];
  for (size_t i = 0; i < out.candidates.size(); ++i) {
    const ArmCandidate& c = out.candidates[i];
    if (static_cast<int>(i) == best || c.excluded) continue;
    if (std::abs(c.angle - chosen.angle) < kTieTolerance) {
      out.tie = true;
      out.warnings.push_back("tie between arm " + std::to_string(chosen.arm_id) + " and arm " +
                             std::to_string(c.arm_id) + "; keeping the lower index");
    }
  }

  const ArmMotion& arm = snapshot.arms[best];
  out.event.time = time;
  out.event.arm_id = chosen.arm_id;
  out.event.tau_observed = tau_hat;
  out.event.match_angle = chosen.angle;
  out.event.p_c_world = snapshot.body_pose.translation + snapshot.body_pose.rotation * arm.ee_body;
  return out;
}

}  // namespace slopeland
