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

// Scenario configuration and its flat `key = value` text format.
//
//   # comment
//   world.incline_deg = 30.5
//   sensor.seed = 7
//
// Every field has a key; unknown keys and unparsable values are errors that
// carry the offending key and line number.

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "slopeland/arm_kinematics.hpp"
#include "slopeland/contact_pipeline.hpp"
#include "slopeland/errors.hpp"
#include "slopeland/se3.hpp"
#include "slopeland/sim/text.hpp"
#include "slopeland/surface_landing.hpp"
#include "slopeland/torque_observer.hpp"

namespace slopeland::sim {

struct WorldConfig {
  double incline_deg = 20.6;
  double slope_azimuth_deg = 90.0;  // downhill direction, from world x towards world y
  Vec3 centroid = Vec3::Zero();
  double half_extent = 2.0;  // m, square patch
};

struct SensorModel {
  double gyro_noise_sigma = 0.0;  // rad/s
  Vec3 gyro_bias = Vec3::Zero();  // rad/s
  double position_noise_sigma = 0.0;  // m
  std::uint64_t seed = 1;
};

struct VehicleConfig {
  VehicleGeometry geometry;
  double yaw_coefficient = AllocationMap::kDefaultYawCoefficient;
  double velocity_lag = 0.1;          // s, first-order translational lag
  double max_thrust_to_weight = 2.0;  // per-rotor limit is this times hover thrust
  double inertia_mismatch = 0.0;      // plant inertia = (1 + f) * model inertia
  Vec3 start = Vec3(-0.8, 0.0, -1.2);
  double start_yaw_deg = 0.0;
};

struct ArmConfig {
  ArmParams params;  // side is ignored; arm 1 is left, arm 2 right
};

struct ControlConfig {
  double attitude_bandwidth = 25.0;  // rad/s
  double damping_ratio = 0.9;
  double integral_ratio = 0.3;  // integral gain as a fraction of bandwidth^3 * I
  int disturbance_feedforward = 1;
  double position_gain = 2.0;  // 1/s
  double max_speed = 0.5;      // m/s
  double position_tolerance = 0.01;  // m
};

struct ApproachConfig {
  Vec3 target = Vec3(0.0, 0.0, -1.0);  // world start location for probing
};

struct ProbeConfig {
  Vec3 direction = Vec3(0.0, 0.0, 1.0);  // body frame
  double speed = 0.1;                    // m/s
  Vec3 start = Vec3(0.1, 0.35, 0.1);     // arm 1 uses -y, arm 2 +y
  double travel = 0.45;                  // m along direction
  double search_step_down = 0.1;         // m
  int max_search_steps = 12;
  double joint_speed = 1.5;  // rad/s for repositioning moves
  int contacts = 2;          // 2 or 3
  double third_dx = -0.25;   // m, x shift of the third probe
};

struct RaiseConfig {
  double delta_q1 = 1.6;     // rad
  double joint_speed = 2.0;  // rad/s
  double hop = 0.05;         // m
};

struct ContactConfig {
  double stiffness = 2000.0;  // N/m
  double damping = 10.0;      // N s/m
};

struct LandingSimConfig {
  double clearance = 0.5;         // m above the estimated centroid
  double descent_velocity = 0.2;  // m/s
  double max_incline_deg = 35.0;
  Vec3 gear = Vec3(-0.20, 0.0, 0.15);  // rear landing gear tip, body frame
  double preset_x = 0.15;              // m, both arms
  double preset_y = 0.35;              // m, arm 1 uses -y
  double settle_time = 0.5;         // s of sustained stance contact
  double tip_force = 2.0;           // N, compliant arm target
  double compliance_gain = 0.05;    // m/s per N
  double max_tip_speed = 0.1;       // m/s
  double level_tolerance_deg = 1.0;
  double stance_tolerance = 0.005;  // m
  double timeout = 15.0;            // s in Descend

  LandingConfig geometry() const {
    LandingConfig g;
    g.approach_clearance = clearance;
    g.descent_velocity = descent_velocity;
    g.max_incline = deg2rad(max_incline_deg);
    g.rear_gear_offset = gear;
    g.preset_xy = {Eigen::Vector2d(preset_x, -preset_y), Eigen::Vector2d(preset_x, preset_y)};
    return g;
  }
};

struct ScenarioConfig {
  std::string name = "default";
  WorldConfig world;
  SensorModel sensor;
  DetectionConfig detection;
  double observer_gain = kDefaultObserverGain;
  double dt = 0.004;
  int substeps = 8;
  double max_sim_time = 180.0;
  VehicleConfig vehicle;
  ArmConfig arm;
  ControlConfig control;
  ApproachConfig approach;
  ProbeConfig probe;
  RaiseConfig raise;
  ContactConfig contact;
  LandingSimConfig landing;

  ArmParams arm_params(int index) const {
    ArmParams p = arm.params;
    p.side = index == 0 ? ArmSide::kLeft : ArmSide::kRight;
    if (index == 1) p.mount_offset.y() = -p.mount_offset.y();
    return p;
  }
};

using FieldRef = std::variant<double*, int*, std::uint64_t*, std::string*>;
using FieldList = std::vector<std::pair<std::string, FieldRef>>;

inline FieldList fields(ScenarioConfig& c) {
  FieldList f;
  auto vec = [&](const std::string& key, Vec3& v) {
    f.emplace_back(key + "_x", &v.x());
    f.emplace_back(key + "_y", &v.y());
    f.emplace_back(key + "_z", &v.z());
  };
  f.emplace_back("name", &c.name);
  f.emplace_back("world.incline_deg", &c.world.incline_deg);
  f.emplace_back("world.slope_azimuth_deg", &c.world.slope_azimuth_deg);
  vec("world.centroid", c.world.centroid);
  f.emplace_back("world.half_extent", &c.world.half_extent);

  f.emplace_back("sensor.gyro_noise_sigma", &c.sensor.gyro_noise_sigma);
  vec("sensor.gyro_bias", c.sensor.gyro_bias);
  f.emplace_back("sensor.position_noise_sigma", &c.sensor.position_noise_sigma);
  f.emplace_back("sensor.seed", &c.sensor.seed);

  f.emplace_back("detection.threshold", &c.detection.threshold);
  f.emplace_back("detection.timeout", &c.detection.timeout);
  f.emplace_back("observer.gain", &c.observer_gain);

  f.emplace_back("sim.dt", &c.dt);
  f.emplace_back("sim.substeps", &c.substeps);
  f.emplace_back("sim.max_time", &c.max_sim_time);

  VehicleGeometry& g = c.vehicle.geometry;
  f.emplace_back("vehicle.body_length", &g.body_length);
  f.emplace_back("vehicle.body_width", &g.body_width);
  f.emplace_back("vehicle.body_height", &g.body_height);
  f.emplace_back("vehicle.rotor_arm_length", &g.rotor_arm_length);
  f.emplace_back("vehicle.body_mass", &g.body_mass);
  f.emplace_back("vehicle.battery_mass", &g.battery_mass);
  f.emplace_back("vehicle.battery_count", &g.battery_count);
  f.emplace_back("vehicle.link1_mass", &g.link_masses[0]);
  f.emplace_back("vehicle.link2_mass", &g.link_masses[1]);
  f.emplace_back("vehicle.link3_mass", &g.link_masses[2]);
  f.emplace_back("vehicle.total_mass", &g.total_mass);
  f.emplace_back("vehicle.yaw_coefficient", &c.vehicle.yaw_coefficient);
  f.emplace_back("vehicle.velocity_lag", &c.vehicle.velocity_lag);
  f.emplace_back("vehicle.max_thrust_to_weight", &c.vehicle.max_thrust_to_weight);
  f.emplace_back("vehicle.inertia_mismatch", &c.vehicle.inertia_mismatch);
  vec("vehicle.start", c.vehicle.start);
  f.emplace_back("vehicle.start_yaw_deg", &c.vehicle.start_yaw_deg);

  ArmParams& a = c.arm.params;
  f.emplace_back("arm.L1", &a.L1);
  f.emplace_back("arm.L2", &a.L2);
  f.emplace_back("arm.L3", &a.L3);
  for (int j = 0; j < 3; ++j) {
    const std::string q = "arm.q" + std::to_string(j + 1);
    f.emplace_back(q + "_min", &a.joint_limits[j].min);
    f.emplace_back(q + "_max", &a.joint_limits[j].max);
  }
  vec("arm.mount", a.mount_offset);

  f.emplace_back("control.attitude_bandwidth", &c.control.attitude_bandwidth);
  f.emplace_back("control.damping_ratio", &c.control.damping_ratio);
  f.emplace_back("control.integral_ratio", &c.control.integral_ratio);
  f.emplace_back("control.disturbance_feedforward", &c.control.disturbance_feedforward);
  f.emplace_back("control.position_gain", &c.control.position_gain);
  f.emplace_back("control.max_speed", &c.control.max_speed);
  f.emplace_back("control.position_tolerance", &c.control.position_tolerance);

  vec("approach.target", c.approach.target);

  vec("probe.direction", c.probe.direction);
  f.emplace_back("probe.speed", &c.probe.speed);
  vec("probe.start", c.probe.start);
  f.emplace_back("probe.travel", &c.probe.travel);
  f.emplace_back("probe.search_step_down", &c.probe.search_step_down);
  f.emplace_back("probe.max_search_steps", &c.probe.max_search_steps);
  f.emplace_back("probe.joint_speed", &c.probe.joint_speed);
  f.emplace_back("probe.contacts", &c.probe.contacts);
  f.emplace_back("probe.third_dx", &c.probe.third_dx);

  f.emplace_back("raise.delta_q1", &c.raise.delta_q1);
  f.emplace_back("raise.joint_speed", &c.raise.joint_speed);
  f.emplace_back("raise.hop", &c.raise.hop);

  f.emplace_back("contact.stiffness", &c.contact.stiffness);
  f.emplace_back("contact.damping", &c.contact.damping);

  f.emplace_back("landing.clearance", &c.landing.clearance);
  f.emplace_back("landing.descent_velocity", &c.landing.descent_velocity);
  f.emplace_back("landing.max_incline_deg", &c.landing.max_incline_deg);
  vec("landing.gear", c.landing.gear);
  f.emplace_back("landing.preset_x", &c.landing.preset_x);
  f.emplace_back("landing.preset_y", &c.landing.preset_y);
  f.emplace_back("landing.settle_time", &c.landing.settle_time);
  f.emplace_back("landing.tip_force", &c.landing.tip_force);
  f.emplace_back("landing.compliance_gain", &c.landing.compliance_gain);
  f.emplace_back("landing.max_tip_speed", &c.landing.max_tip_speed);
  f.emplace_back("landing.level_tolerance_deg", &c.landing.level_tolerance_deg);
  f.emplace_back("landing.stance_tolerance", &c.landing.stance_tolerance);
  f.emplace_back("landing.timeout", &c.landing.timeout);
  return f;
}

namespace detail {

inline std::string format_field(const FieldRef& ref) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(*p);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return *p;
        } else {
          return std::to_string(*p);
        }
      },
      ref);
}

// Returns false when the text does not parse as the field's type.
inline bool assign_field(const FieldRef& ref, std::string_view text) {
  return std::visit(
      [&](auto* p) -> bool {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          auto v = parse_double(text);
          if (!v) return false;
          *p = *v;
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = std::string(trim(text));
        } else {
          auto v = parse_int<T>(text);
          if (!v) return false;
          *p = *v;
        }
        return true;
      },
      ref);
}

}  // namespace detail

// Sets one key. `line` is only used for error messages (0 = command line).
inline void set_value(ScenarioConfig& c, std::string_view key, std::string_view value,
                      int line = 0) {
  for (auto& [k, ref] : fields(c)) {
    if (k != key) continue;
    if (!detail::assign_field(ref, value)) {
      throw ParseError("key '" + k + "': cannot parse value '" + std::string(trim(value)) + "'",
                       line);
    }
    return;
  }
  throw ParseError("unknown key '" + std::string(key) + "'", line);
}

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

inline std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const std::string_view key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", line);
    out.push_back({std::string(key), std::string(trim(s.substr(eq + 1))), line});
  }
  return out;
}

// Parses "key=value" as given on a command line.
inline KeyValue parse_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || trim(text.substr(0, eq)).empty()) {
    throw ParseError("override '" + std::string(text) + "' is not key=value", 0);
  }
  return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1))), 0};
}

inline void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgumentError("config: " + what);
  };
  require(c.world.incline_deg >= 0.0 && c.world.incline_deg <= 45.0,
          "world.incline_deg must be within [0, 45]");
  require(c.world.half_extent > 0.0, "world.half_extent must be > 0");
  require(c.sensor.gyro_noise_sigma >= 0.0, "sensor.gyro_noise_sigma must be >= 0");
  require(c.sensor.position_noise_sigma >= 0.0, "sensor.position_noise_sigma must be >= 0");
  require(c.dt > 0.0, "sim.dt must be > 0");
  require(c.substeps >= 1, "sim.substeps must be >= 1");
  require(c.max_sim_time > 0.0, "sim.max_time must be > 0");
  require(c.observer_gain > 0.0 && c.observer_gain * c.dt < 2.0,
          "observer.gain must satisfy 0 < gain * dt < 2");
  require(c.probe.search_step_down > 0.0, "probe.search_step_down must be > 0");
  require(c.probe.direction.norm() > 0.0, "probe.direction must be nonzero");
  require(c.probe.speed > 0.0, "probe.speed must be > 0");
  require(c.probe.contacts == 2 || c.probe.contacts == 3, "probe.contacts must be 2 or 3");
  require(c.vehicle.velocity_lag > 0.0, "vehicle.velocity_lag must be > 0");
  require(c.vehicle.inertia_mismatch > -1.0, "vehicle.inertia_mismatch must be > -1");
  require(c.contact.stiffness >= 0.0 && c.contact.damping >= 0.0,
          "contact stiffness and damping must be >= 0");
  require(c.landing.descent_velocity > 0.0, "landing.descent_velocity must be > 0");
  c.detection.validate();
  c.arm.params.validate();
}

inline void apply_values(ScenarioConfig& c, const std::vector<KeyValue>& kvs) {
  for (const KeyValue& kv : kvs) set_value(c, kv.key, kv.value, kv.line);
}

inline ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig c;
  apply_values(c, parse_key_values(in));
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  return parse_scenario(in);
}

// All keys in declaration order, one "key = value" per line.
inline std::string dump(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  std::string out;
  for (const auto& [k, ref] : fields(copy)) out += k + " = " + detail::format_field(ref) + "\n";
  return out;
}

}  // namespace slopeland::sim
