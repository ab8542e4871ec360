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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "slopeland/sim/config.hpp"
#include "slopeland/sim/plant.hpp"
#include "slopeland/sim/telemetry.hpp"
#include "slopeland/sim/world.hpp"

namespace slopeland::sim {
namespace {

TEST(Config, CheckedInDefaultsMatchBuiltIns) {
  const ScenarioConfig file = load_scenario(SLOPELAND_SOURCE_DIR "/config/default.cfg");
  EXPECT_EQ(dump(file), dump(ScenarioConfig{}));
}

TEST(Config, DumpParsesBackToTheSameConfig) {
  ScenarioConfig c;
  c.name = "custom";
  c.world.incline_deg = 30.5;
  c.sensor.gyro_noise_sigma = 0.01;
  c.sensor.seed = 12345678901234ull;
  c.probe.direction = Vec3(0.1, 0.0, 1.0 / 3.0);
  std::istringstream in(dump(c));
  EXPECT_EQ(dump(parse_scenario(in)), dump(c));
}

TEST(Config, CommentsAndBlankLinesIgnored) {
  std::istringstream in("# header\n\n  world.incline_deg = 11.3   # trailing\nsim.dt=0.002\n");
  const ScenarioConfig c = parse_scenario(in);
  EXPECT_EQ(c.world.incline_deg, 11.3);
  EXPECT_EQ(c.dt, 0.002);
}

TEST(Config, UnknownKeyReportsKeyAndLine) {
  std::istringstream in("world.incline_deg = 1\n\nworld.inclination = 3\n");
  try {
    parse_scenario(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("world.inclination"), std::string::npos);
  }
}

TEST(Config, BadValueReportsKeyAndLine) {
  std::istringstream in("sensor.seed = -4\n");
  try {
    parse_scenario(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("sensor.seed"), std::string::npos);
  }
  std::istringstream in2("sim.dt = 0.004x\n");
  EXPECT_THROW(parse_scenario(in2), ParseError);
  std::istringstream in3("just words\n");
  EXPECT_THROW(parse_scenario(in3), ParseError);
}

TEST(Config, ValidationRejectsOutOfRangeValues) {
  ScenarioConfig c;
  c.world.incline_deg = 60.0;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  c = ScenarioConfig{};
  c.dt = 0.0;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  c = ScenarioConfig{};
  c.probe.search_step_down = 0.0;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  c = ScenarioConfig{};
  c.sensor.gyro_noise_sigma = -0.1;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  EXPECT_NO_THROW(validate(ScenarioConfig{}));
}

TEST(Config, OverrideSyntax) {
  const KeyValue kv = parse_override("world.incline_deg=30.5");
  EXPECT_EQ(kv.key, "world.incline_deg");
  EXPECT_EQ(kv.value, "30.5");
  EXPECT_THROW(parse_override("world.incline_deg"), ParseError);
  EXPECT_THROW(parse_override("=3"), ParseError);
}

TEST(WorldPlane, InclinedNormalAndHeight) {
  const WorldPlane w = WorldPlane::inclined(30.5);
  const double a = deg2rad(30.5);
  EXPECT_NEAR((w.true_normal - Vec3(0, std::sin(a), -std::cos(a))).norm(), 0.0, 1e-15);
  // Descends (z grows, NED) towards +y.
  EXPECT_NEAR(w.height_at(0.0, 1.0), std::tan(a), 1e-12);
  EXPECT_NEAR(w.signed_distance(Vec3(0.3, 1.0, std::tan(a))), 0.0, 1e-12);
  EXPECT_GT(w.signed_distance(Vec3(0, 0, -0.1)), 0.0);
  EXPECT_THROW(WorldPlane::inclined(45.5), InvalidArgumentError);
  EXPECT_THROW(WorldPlane::inclined(-1.0), InvalidArgumentError);
}

TEST(ContactModel, AbovePlaneIsFree) {
  const WorldPlane w = WorldPlane::inclined(0.0);
  const TipContact c = contact_model(Vec3(0, 0, -0.001), Vec3(0, 0, 0.5), w, ContactParams{},
                                     Vec3(0.1, -0.35, 0.5));
  EXPECT_FALSE(c.in_contact);
  EXPECT_EQ(c.force_world, Vec3::Zero());
  EXPECT_EQ(c.torque_body, Vec3::Zero());
}

TEST(ContactModel, OneMillimetreDeepGivesTwoNewtons) {
  const WorldPlane w = WorldPlane::inclined(0.0);
  const Vec3 lever(0.1, -0.35, 0.5);
  const TipContact c = contact_model(Vec3(0, 0, 0.001), Vec3::Zero(), w, {2000.0, 10.0}, lever);
  ASSERT_TRUE(c.in_contact);
  EXPECT_NEAR(c.normal_force, 2.0, 1e-12);
  EXPECT_NEAR((c.force_world - Vec3(0, 0, -2.0)).norm(), 0.0, 1e-12);
  // lever x F by hand: (ly*Fz - lz*Fy, lz*Fx - lx*Fz, lx*Fy - ly*Fx).
  EXPECT_NEAR((c.torque_body - Vec3(0.7, 0.2, 0.0)).norm(), 0.0, 1e-12);
}

TEST(ContactModel, ForceFollowsTheTrueNormalOnASlope) {
  const WorldPlane w = WorldPlane::inclined(20.6);
  const Vec3 p = Vec3(0.2, 0.4, w.height_at(0.2, 0.4)) - 0.002 * w.true_normal;
  const TipContact c = contact_model(p, Vec3::Zero(), w, {2000.0, 10.0});
  ASSERT_TRUE(c.in_contact);
  EXPECT_NEAR(c.penetration, 0.002, 1e-12);
  EXPECT_NEAR((c.force_world - 4.0 * w.true_normal).norm(), 0.0, 1e-9);
}

TEST(ContactModel, DampingAddsAndNeverPulls) {
  const WorldPlane w = WorldPlane::inclined(0.0);
  const TipContact pressing = contact_model(Vec3(0, 0, 0.001), Vec3(0, 0, 0.1), w, {2000.0, 10.0});
  EXPECT_NEAR(pressing.normal_force, 3.0, 1e-12);
  const TipContact leaving = contact_model(Vec3(0, 0, 0.001), Vec3(0, 0, -1.0), w, {2000.0, 10.0});
  EXPECT_TRUE(leaving.in_contact);
  EXPECT_EQ(leaving.normal_force, 0.0);
}

TEST(ContactModel, OutsideTheExtentIsFree) {
  const WorldPlane w = WorldPlane::inclined(0.0, 90.0, Vec3::Zero(), 1.0);
  EXPECT_FALSE(contact_model(Vec3(1.5, 0, 0.01), Vec3::Zero(), w, {}).in_contact);
  EXPECT_TRUE(contact_model(Vec3(0.9, -0.9, 0.01), Vec3::Zero(), w, {}).in_contact);
}

PlantModel test_plant() {
  PlantModel m;
  for (int i = 0; i < kArmCount; ++i) m.arms[i].side = i == 0 ? ArmSide::kLeft : ArmSide::kRight;
  m.substeps = 8;
  return m;
}

VehicleState hovering_state() {
  VehicleState s;
  s.p_b = Vec3(0.0, 0.0, -3.0);
  for (auto& q : s.q) q = JointConfig{0.3, 0.2, 0.5};
  return s;
}

TEST(StepPlant, HoverWithoutContactLeavesTheStateUnchanged) {
  const PlantModel m = test_plant();
  const WorldPlane w = WorldPlane::inclined(0.0);
  PlantInputs in;
  in.u = m.alloc.thrusts_for(m.mass * kGravity, Vec3::Zero());
  ASSERT_EQ(m.alloc.moments(in.u), Vec3::Zero());
  const VehicleState s0 = hovering_state();
  VehicleState s = s0;
  for (int k = 0; k < 250; ++k) s = step_plant(s, in, w, 0.004, m);
  EXPECT_EQ(s.p_b, s0.p_b);
  EXPECT_EQ(s.v_b, s0.v_b);
  EXPECT_EQ(s.omega, s0.omega);
  EXPECT_EQ(s.R_b.matrix(), s0.R_b.matrix());
  for (int i = 0; i < kArmCount; ++i) EXPECT_EQ(s.q[i].vec(), s0.q[i].vec());
}

TEST(StepPlant, SingleAxisTorqueStepMatchesClosedForm) {
  // Principal-axis spin with a constant torque: w(t) = w0 + tau t / I and
  // angle(t) = w0 t + tau t^2 / (2 I); the gyroscopic term vanishes.
  const PlantModel m = test_plant();
  const WorldPlane w = WorldPlane::inclined(0.0);
  for (int axis = 0; axis < 3; ++axis) {
    const double inertia = m.inertia.matrix()(axis, axis);
    VehicleState s = hovering_state();
    s.omega[axis] = 0.2;
    PlantInputs in;
    in.tau_injected[axis] = 0.05;
    const double dt = 0.004;
    const int n = 250;
    for (int k = 0; k < n; ++k) s = step_plant(s, in, w, dt, m);
    const double t = n * dt;
    const double w_exact = 0.2 + 0.05 * t / inertia;
    const double angle_exact = 0.2 * t + 0.05 * t * t / (2.0 * inertia);
    EXPECT_NEAR(s.omega[axis], w_exact, 1e-3 * w_exact) << axis;
    const Eigen::AngleAxisd aa(s.R_b.matrix());
    EXPECT_NEAR(aa.angle(), angle_exact, 1e-3 * angle_exact) << axis;
  }
}

TEST(StepPlant, CommandedDescentFollowsTheFirstOrderLag) {
  const PlantModel m = test_plant();
  const WorldPlane w = WorldPlane::inclined(0.0);
  VehicleState s = hovering_state();
  PlantInputs in;
  in.v_cmd = Vec3(0, 0, 0.2);
  for (int k = 0; k < 250; ++k) s = step_plant(s, in, w, 0.004, m);
  const double dz = s.p_b.z() - hovering_state().p_b.z();
  // 0.2 m within the lag allowance v * tau.
  EXPECT_NEAR(dz, 0.2, 0.2 * m.velocity_lag);
  // Continuous first-order lag: v (t - tau (1 - exp(-t/tau))).
  const double tau = m.velocity_lag;
  EXPECT_NEAR(dz, 0.2 * (1.0 - tau * (1.0 - std::exp(-1.0 / tau))), 1e-3);
}

TEST(StepPlant, ArmsFollowCommandedRatesExactly) {
  const PlantModel m = test_plant();
  const WorldPlane w = WorldPlane::inclined(0.0);
  VehicleState s = hovering_state();
  PlantInputs in;
  in.qd[0] = JointVelocity{0.5, -0.25, 0.125};
  in.qd[1] = JointVelocity{-0.5, 0.0, 0.25};
  const VehicleState s0 = s;
  for (int k = 0; k < 10; ++k) s = step_plant(s, in, w, 0.004, m);
  for (int i = 0; i < kArmCount; ++i) {
    EXPECT_NEAR((s.q[i].vec() - (s0.q[i].vec() + 0.04 * in.qd[i].vec())).norm(), 0.0, 1e-14);
  }
}

TEST(StepPlant, KineticEnergyNeverIncreasesWithoutInput) {
  const PlantModel m = test_plant();
  const WorldPlane w = WorldPlane::inclined(0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    VehicleState s = hovering_state();
    s.omega = Vec3(uni(rng), uni(rng), uni(rng));
    double e = kinetic_energy(s, m);
    for (int k = 0; k < 500; ++k) {
      s = step_plant(s, PlantInputs{}, w, 0.004, m);
      const double e1 = kinetic_energy(s, m);
      ASSERT_LE(e1, e * (1.0 + 1e-12)) << trial << " " << k;
      e = e1;
    }
  }
}

TEST(StepPlant, ContactTorqueAndFlagsReachTheBody) {
  PlantModel m = test_plant();
  const WorldPlane w = WorldPlane::inclined(0.0);
  VehicleState s;
  s.q[0] = JointConfig{0.5, 0.2, 0.8};
  s.q[1] = JointConfig{2.2, 0.0, 0.0};  // raised
  const Vec3 ee = ee_position(m.arms[0], s.q[0]);
  s.p_b = Vec3(0, 0, -ee.z() + 0.001);  // arm 1 tip 1 mm deep
  ContactReport r;
  step_plant(s, PlantInputs{}, w, 1e-6, m, &r);
  EXPECT_TRUE(r.tip_touched[0]);
  EXPECT_FALSE(r.tip_touched[1]);
  EXPECT_FALSE(r.gear_touched);
  const ContactReport now = evaluate_contacts(s, m, w);
  EXPECT_NEAR(now.tips[0].normal_force, 2.0, 1e-9);
  EXPECT_NEAR((now.torque_body - ee.cross(Vec3(0, 0, -2.0))).norm(), 0.0, 1e-9);
}

TEST(Phases, TransitionGraph) {
  EXPECT_TRUE(legal_transition(Phase::kApproach, Phase::kProbe));
  EXPECT_TRUE(legal_transition(Phase::kProbe, Phase::kRaiseArm));
  EXPECT_TRUE(legal_transition(Phase::kProbe, Phase::kReposition));
  EXPECT_TRUE(legal_transition(Phase::kRaiseArm, Phase::kPlanLanding));
  EXPECT_TRUE(legal_transition(Phase::kPlanLanding, Phase::kDescend));
  EXPECT_TRUE(legal_transition(Phase::kDescend, Phase::kLanded));
  EXPECT_TRUE(legal_transition(Phase::kDescend, Phase::kAborted));
  EXPECT_FALSE(legal_transition(Phase::kApproach, Phase::kRaiseArm));
  EXPECT_FALSE(legal_transition(Phase::kReposition, Phase::kRaiseArm));
  EXPECT_FALSE(legal_transition(Phase::kProbe, Phase::kDescend));
  EXPECT_FALSE(legal_transition(Phase::kLanded, Phase::kAborted));
  EXPECT_FALSE(legal_transition(Phase::kAborted, Phase::kProbe));
  for (Phase p : {Phase::kApproach, Phase::kDescend, Phase::kAborted}) {
    EXPECT_EQ(phase_from_string(to_string(p)), p);
  }
}

TelemetryRow random_row(std::mt19937_64& rng, double t) {
  std::normal_distribution<double> n(0.0, 1.0);
  TelemetryRow r;
  r.t = t;
  r.p = Vec3(n(rng), n(rng), n(rng));
  r.rpy = {n(rng) * 0.1, n(rng) * 0.1, n(rng)};
  r.omega = Vec3(n(rng), n(rng), n(rng)) * 1e-3;
  r.u = Vec4(n(rng), n(rng), n(rng), n(rng)) + Vec4::Constant(10.0);
  for (int i = 0; i < kArmCount; ++i) {
    r.q[i] = JointConfig{n(rng), n(rng), n(rng)};
    r.qd[i] = JointVelocity{n(rng), n(rng), 1e-300};
  }
  r.tau_hat = Vec3(n(rng), -0.0, 5e-324);
  r.phase = Phase::kProbe;
  r.event_flag = 1;
  r.event_arm = 2;
  return r;
}

TEST(Telemetry, RowsRoundTripBitExactly) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const TelemetryRow r = random_row(rng, 0.004 * (k + 1));
    const TelemetryRow back = parse_row(format_row(r), 2);
    EXPECT_TRUE(back == r) << format_row(r);
    EXPECT_EQ(format_row(back), format_row(r));
  }
}

std::string sample_log(int rows) {
  std::mt19937_64 rng(5);
  std::vector<TelemetryRow> v;
  for (int k = 0; k < rows; ++k) v.push_back(random_row(rng, 0.004 * (k + 1)));
  std::ostringstream os;
  write_telemetry(os, v);
  return os.str();
}

TEST(Telemetry, ReadsWhatItWrites) {
  std::istringstream in(sample_log(20));
  const TelemetryLog log = read_telemetry(in);
  EXPECT_EQ(log.rows.size(), 20u);
  EXPECT_FALSE(log.truncated);
}

TEST(Telemetry, TruncatedLastLineIsDropped) {
  const std::string text = sample_log(20);
  std::istringstream in(text.substr(0, text.size() - 40));
  const TelemetryLog log = read_telemetry(in);
  EXPECT_EQ(log.rows.size(), 19u);
  EXPECT_TRUE(log.truncated);
}

TEST(Telemetry, ShuffledTimestampsAreASchemaError) {
  std::string text = sample_log(6);
  auto lines = split(text, '\n');
  std::string shuffled;
  const std::vector<int> order = {0, 1, 2, 4, 3, 5, 6};
  for (int i : order) shuffled += std::string(lines[i]) + "\n";
  std::istringstream in(shuffled);
  try {
    read_telemetry(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
  }
}

TEST(Telemetry, MalformedMiddleLineIsASchemaError) {
  std::string text = sample_log(6);
  auto lines = split(text, '\n');
  std::string broken;
  for (size_t i = 0; i + 1 < lines.size(); ++i) {
    broken += (i == 3 ? std::string("1,2,3") : std::string(lines[i])) + "\n";
  }
  std::istringstream in(broken);
  try {
    read_telemetry(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  std::istringstream no_header("t,px\n");
  EXPECT_THROW(read_telemetry(no_header), ParseError);
}

}  // namespace
}  // namespace slopeland::sim
