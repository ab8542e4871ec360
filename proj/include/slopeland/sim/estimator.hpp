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

// Proprioceptive estimator: observer, detection, localization and plane
// estimation driven only by telemetry samples. The live simulation and
// replay both feed it rows, so their results agree bit for bit.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slopeland/contact_pipeline.hpp"
#include "slopeland/sim/config.hpp"
#include "slopeland/sim/telemetry.hpp"
#include "slopeland/surface_landing.hpp"
#include "slopeland/torque_observer.hpp"

namespace slopeland::sim {

struct EstimatorSetup {
  BodyInertia inertia;
  AllocationMap alloc;
  std::array<ArmParams, kArmCount> arms{};
  double dt = 0.004;
  double observer_gain = kDefaultObserverGain;
  DetectionConfig detection;
  int contacts_required = 2;

  static EstimatorSetup from_config(const ScenarioConfig& c) {
    EstimatorSetup s;
    s.inertia = BodyInertia::box_model(c.vehicle.geometry);
    s.alloc = AllocationMap(c.vehicle.geometry, c.vehicle.yaw_coefficient);
    for (int i = 0; i < kArmCount; ++i) s.arms[i] = c.arm_params(i);
    s.dt = c.dt;
    s.observer_gain = c.observer_gain;
    s.detection = c.detection;
    s.contacts_required = c.probe.contacts;
    return s;
  }
};

struct EstimatorStep {
  Vec3 tau_hat = Vec3::Zero();
  std::optional<ContactEvent> event;
};

class Estimator {
 public:
  explicit Estimator(EstimatorSetup setup)
      : setup_(std::move(setup)),
        observer_(reset(setup_.dt, setup_.observer_gain)),
        detector_(setup_.detection) {}

  EstimatorStep process(const TelemetryRow& row) {
    EstimatorStep out;
    auto [next, tau] = observer_step(observer_, setup_.inertia, setup_.alloc,
                                     GyroSample{row.omega, row.u, row.t});
    observer_ = next;
    out.tau_hat = tau;
    detector_.set_armed(row.phase == Phase::kProbe);
    if (!detector_.update(tau, row.t)) return out;

    ArmMotionSnapshot snap;
    snap.body_pose = body_pose(row.p, rpy_to_rot(row.rpy));
    for (int i = 0; i < kArmCount; ++i) {
      snap.arms.push_back(ArmMotion::from_kinematics(i + 1, setup_.arms[i], row.q[i], row.qd[i]));
    }
    try {
      Localization loc = localize(tau, snap, row.t);
      for (const std::string& w : loc.warnings) warnings_.push_back(w);
      events_.push_back(loc.event);
      body_x_at_event_.push_back(snap.body_pose.rotation * Vec3::UnitX());
      out.event = loc.event;
    } catch (const NoCandidateArmError& e) {
      warnings_.push_back("detection at t=" + format_double(row.t) + " not localized: " +
                          e.what());
    }
    return out;
  }

  const std::vector<ContactEvent>& events() const { return events_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool plane_ready() const {
    return static_cast<int>(events_.size()) >= setup_.contacts_required;
  }

  // Plane from the first two (or three) events; the two-point form uses the
  // body x axis at the last of them.
  PlaneEstimate plane() const {
    if (!plane_ready()) throw InvalidArgumentError("not enough contact events for a plane");
    if (setup_.contacts_required == 3) {
      return plane_from_three(events_[0].p_c_world, events_[1].p_c_world, events_[2].p_c_world);
    }
    return plane_from_two(events_[0].p_c_world, events_[1].p_c_world, body_x_at_event_[1]);
  }

 private:
  EstimatorSetup setup_;
  ObserverState observer_;
  ContactDetector detector_;
  std::vector<ContactEvent> events_;
  std::vector<Vec3> body_x_at_event_;
  std::vector<std::string> warnings_;
};

}  // namespace slopeland::sim
