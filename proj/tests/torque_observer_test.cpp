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

#include "slopeland/torque_observer.hpp"

#include <cstring>

#include <gtest/gtest.h>

namespace slopeland {
namespace {

// Matched plant for the observer: backward Euler on Euler's rotational
// equation, I (w1 - w0) / dt = N u + tau_ext - w1 x I w1, solved by Newton.
Vec3 plant_step(const Mat3& inertia, const Vec3& w0, const Vec3& moment, double dt) {
  Vec3 w = w0;
  const Vec3 rhs = inertia * w0 + dt * moment;
  for (int it = 0; it < 50; ++it) {
    const Vec3 f = inertia * w + dt * w.cross(inertia * w) - rhs;
    if (f.norm() < 1e-18) break;
    // d/dw (w x Iw) = [w]x I - [Iw]x
    auto skew = [](const Vec3& v) {
      Mat3 s;
      s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
      return s;
    };
    const Mat3 jac = inertia + dt * (skew(w) * inertia - skew(inertia * w));
    w -= jac.partialPivLu().solve(f);
  }
  return w;
}

struct ObserverRun {
  Vec3 final_estimate;
  double settle_time;  // first time after which error stays under 1 %
};

ObserverRun run_constant_torque(const Vec3& tau_ext, double duration, double dt = 0.004) {
  BodyInertia inertia;
  AllocationMap alloc;
  ObserverState st = reset(dt);
  Vec3 w = Vec3::Zero();
  const Vec4 u = alloc.thrusts_for(40.0, Vec3::Zero());
  const int steps = static_cast<int>(std::round(duration / dt));
  double settle = 0.0;
  Vec3 est = Vec3::Zero();
  for (int k = 0; k < steps; ++k) {
    w = plant_step(inertia.matrix(), w, alloc.moments(u) + tau_ext, dt);
    auto [next, tau] = observer_step(st, inertia, alloc, {w, u, k * dt});
    st = next;
    est = tau;
    if ((tau - tau_ext).norm() >= 0.01 * tau_ext.norm()) settle = (k + 1) * dt;
  }
  return {est, settle};
}

TEST(TorqueObserverTest, RestGivesExactZero) {
  BodyInertia inertia;
  AllocationMap alloc;
  ObserverState st = reset(0.004);
  const Vec4 hover = alloc.thrusts_for(40.66, Vec3::Zero());
  ASSERT_LT(alloc.moments(hover).norm(), 1e-14);
  for (int k = 0; k < 1000; ++k) {
    GyroSample s{Vec3::Zero(), Vec4::Zero(), k * 0.004};
    auto [next, tau] = observer_step(st, inertia, alloc, s);
    st = next;
    ASSERT_EQ(tau, Vec3::Zero());
  }
}

TEST(TorqueObserverTest, ResetState) {
  ObserverState s = reset(0.004);
  EXPECT_EQ(s.tau_hat, Vec3::Zero());
  EXPECT_EQ(s.running_sum, Vec3::Zero());
  EXPECT_EQ(s.t_d, 0);
  auto [next, tau] = observer_step(s, BodyInertia{}, AllocationMap{}, GyroSample{});
  EXPECT_EQ(tau, Vec3::Zero());
  EXPECT_EQ(next.t_d, 1);
  EXPECT_THROW(reset(-1.0), InvalidArgumentError);
  EXPECT_THROW(reset(0.0), InvalidArgumentError);
}

TEST(TorqueObserverTest, RecoversConstantRollTorque) {
  ObserverRun r = run_constant_torque(Vec3(0.5, 0, 0), 2.0);
  EXPECT_NEAR(r.final_estimate.x(), 0.5, 0.005);
  EXPECT_LT(r.settle_time, 0.5);
}

TEST(TorqueObserverTest, RecoversTorquesOnEveryAxis) {
  for (double mag : {0.05, 0.1, 0.5, 1.0, 2.0}) {
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 tau = Vec3::Zero();
      tau[axis] = mag;
      ObserverRun r = run_constant_torque(tau, 1.0);
      EXPECT_LT((r.final_estimate - tau).norm(), 0.01 * mag) << "axis " << axis;
      EXPECT_LT(r.settle_time, 0.5) << "axis " << axis << " magnitude " << mag;
    }
  }
}

TEST(TorqueObserverTest, MixedTorqueWithGyroscopicCoupling) {
  Vec3 tau(0.2, -0.3, 0.1);
  ObserverRun r = run_constant_torque(tau, 1.0);
  EXPECT_LT((r.final_estimate - tau).norm(), 0.01 * tau.norm());
}

TEST(TorqueObserverTest, LinearInTorque) {
  Vec3 a = run_constant_torque(Vec3(0.1, 0.05, 0), 1.0).final_estimate;
  Vec3 b = run_constant_torque(Vec3(0.2, 0.1, 0), 1.0).final_estimate;
  EXPECT_LT((b - 2.0 * a).norm(), 0.01 * b.norm());
}

TEST(TorqueObserverTest, TorqueFreePrecessionStaysQuiet) {
  BodyInertia inertia;
  AllocationMap alloc;
  const double dt = 0.004;
  Vec3 w(1.0, 0.5, -0.3);
  ObserverState st = reset(dt, kDefaultObserverGain, inertia * w);
  double worst = 0.0;
  for (int k = 0; k < 2500; ++k) {
    w = plant_step(inertia.matrix(), w, Vec3::Zero(), dt);
    auto [next, tau] = observer_step(st, inertia, alloc, {w, Vec4::Zero(), k * dt});
    st = next;
    worst = std::max(worst, tau.norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(TorqueObserverTest, UnityGainMatchesPrintedRecursion) {
  // With K = 1 the first estimate equals I w + (w x I w - N u) dt.
  BodyInertia inertia;
  AllocationMap alloc;
  ObserverState st = reset(0.004, 1.0);
  Vec3 w(0.1, -0.2, 0.05);
  Vec4 u(9, 10, 11, 10.5);
  auto [next, tau] = observer_step(st, inertia, alloc, {w, u, 0.0});
  Vec3 expected = inertia * w + (w.cross(inertia * w) - alloc.moments(u)) * 0.004;
  EXPECT_LT((tau - expected).norm(), 1e-15);
  // Second step adds the first residual increment to the sum.
  Vec3 w2(0.12, -0.1, 0.0);
  auto [next2, tau2] = observer_step(next, inertia, alloc, {w2, u, 0.004});
  Vec3 expected2 = inertia * w2 + (w2.cross(inertia * w2) - alloc.moments(u)) * 0.004 +
                   (w.cross(inertia * w) - alloc.moments(u) - tau) * 0.004;
  EXPECT_LT((tau2 - expected2).norm(), 1e-15);
}

TEST(TorqueObserverTest, DeterministicStreams) {
  auto run = [] {
    BodyInertia inertia;
    AllocationMap alloc;
    ObserverState st = reset(0.004);
    Vec3 out = Vec3::Zero();
    for (int k = 0; k < 500; ++k) {
      Vec3 w(std::sin(0.01 * k), std::cos(0.02 * k) - 1.0, 0.001 * k);
      Vec4 u(10 + std::sin(k), 10, 10, 10);
      auto [next, tau] = observer_step(st, inertia, alloc, {w, u, k * 0.004});
      st = next;
      out = tau;
    }
    return out;
  };
  Vec3 a = run(), b = run();
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * 3), 0);
}

TEST(TorqueObserverTest, RejectsNonFiniteAndOutOfOrder) {
  ObserverState st = reset(0.004);
  GyroSample bad;
  bad.omega.x() = std::nan("");
  EXPECT_THROW(observer_step(st, BodyInertia{}, AllocationMap{}, bad), NonFiniteInputError);
  GyroSample s;
  s.timestamp = 1.0;
  st = observer_step(st, BodyInertia{}, AllocationMap{}, s).first;
  s.timestamp = 0.5;
  EXPECT_THROW(observer_step(st, BodyInertia{}, AllocationMap{}, s), InvalidArgumentError);
}

TEST(TorqueObserverTest, AllocationStructure) {
  AllocationMap alloc;
  const Mat34& n = alloc.moment_matrix();
  // Diagonal opposite rotors (1,2) and (3,4) give opposite roll/pitch moments.
  EXPECT_DOUBLE_EQ(n(0, 0), -n(0, 1));
  EXPECT_DOUBLE_EQ(n(1, 0), -n(1, 1));
  EXPECT_DOUBLE_EQ(n(0, 2), -n(0, 3));
  EXPECT_DOUBLE_EQ(n(1, 2), -n(1, 3));
  // Rotor arm geometry from the body corners.
  EXPECT_NEAR(alloc.rotor_positions()[0].x(), 0.176 + 0.160 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(alloc.rotor_positions()[0].y(), 0.055 + 0.160 / std::sqrt(2.0), 1e-15);
  Vec3 m(0.3, -0.2, 0.05);
  Vec4 u = alloc.thrusts_for(40.0, m);
  EXPECT_NEAR(u.sum(), 40.0, 1e-12);
  EXPECT_LT((alloc.moments(u) - m).norm(), 1e-12);
}

TEST(TorqueObserverTest, BoxInertiaModel) {
  // m = 1.287 + 2 * 0.828 kg; box 0.352 x 0.110 x 0.100 m widened by the
  // rotor arms, 2 * 0.160 * cos(45 deg) on each axis.
  BodyInertia i;
  const double m = 2.943;
  const double lx = 0.352 + 0.2262741699796952, wy = 0.110 + 0.2262741699796952;
  EXPECT_NEAR(i.matrix()(0, 0), m / 12 * (wy * wy + 0.1 * 0.1), 1e-15);
  EXPECT_NEAR(i.matrix()(1, 1), m / 12 * (lx * lx + 0.1 * 0.1), 1e-15);
  EXPECT_NEAR(i.matrix()(2, 2), m / 12 * (lx * lx + wy * wy), 1e-15);
  EXPECT_NEAR(i.matrix()(0, 0), 0.0302, 1e-4);
  Mat3 bad = Mat3::Identity();
  bad(0, 1) = 0.5;
  EXPECT_THROW(BodyInertia{bad}, InvalidArgumentError);
  EXPECT_THROW(BodyInertia{Mat3(-Mat3::Identity())}, InvalidArgumentError);
}

TEST(TorqueObserverTest, DroppedArmMomentumSmallWhenSlow) {
  ArmParams p;
  VehicleGeometry g;
  JointConfig q{0.6, 0.1, 0.5};
  Vec3 still = dropped_arm_momentum(p, g.link_masses, q, {0, 0, 0});
  EXPECT_LT(still.norm(), 1e-12);
  Vec3 moving = dropped_arm_momentum(p, g.link_masses, q, {0.3, 0, 0});
  EXPECT_GT(moving.norm(), 0.0);
  EXPECT_LT(moving.norm(), 0.05);
}

}  // namespace
}  // namespace slopeland
