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

#include "slopeland/se3.hpp"

#include <random>

#include <gtest/gtest.h>

namespace slopeland {
namespace {

double max_abs_diff(const Mat3& a, const Mat3& b) { return (a - b).cwiseAbs().maxCoeff(); }

Rot3 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis(u(rng), u(rng), u(rng));
  return Rot3::from_angle_axis(kPi * u(rng), axis.normalized());
}

Pose random_pose(std::mt19937_64& rng, const std::string& from, const std::string& to) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return {random_rotation(rng), Vec3(u(rng), u(rng), u(rng)), from, to};
}

TEST(Se3Test, IdentityComposition) {
  Pose id = Pose::identity("a");
  Pose r = compose(id, id);
  EXPECT_EQ(max_abs_diff(r.rotation.matrix(), Mat3::Identity()), 0.0);
  EXPECT_EQ(r.translation, Vec3::Zero());
}

TEST(Se3Test, PureTranslationsAdd) {
  Pose a{Rot3(), Vec3(1, 0, 0), "w", "b"};
  Pose b{Rot3(), Vec3(0, 2, 0), "b", "e"};
  Pose r = a * b;
  EXPECT_EQ(r.translation, Vec3(1, 2, 0));
  EXPECT_EQ(r.from_frame, "w");
  EXPECT_EQ(r.to_frame, "e");
}

TEST(Se3Test, YawQuarterTurnMapsForwardToRight) {
  Pose body{rpy_to_rot({0, 0, kPi / 2}), Vec3::Zero(), "world", "body"};
  Pose ee{Rot3(), Vec3(1, 0, 0), "body", "ee"};
  Pose w = body * ee;
  EXPECT_NEAR(w.translation.x(), 0.0, 1e-15);
  EXPECT_NEAR(w.translation.y(), 1.0, 1e-15);
  EXPECT_NEAR(w.translation.z(), 0.0, 1e-15);
}

TEST(Se3Test, FrameMismatchThrows) {
  Pose a{Rot3(), Vec3::Zero(), "world", "body"};
  Pose b{Rot3(), Vec3::Zero(), "ee", "tool"};
  EXPECT_THROW(compose(a, b), FrameMismatchError);
  EXPECT_NO_THROW(compose_unchecked(a, b));
}

TEST(Se3Test, RpyZeroIsIdentity) {
  EXPECT_EQ(max_abs_diff(rpy_to_rot({0, 0, 0}).matrix(), Mat3::Identity()), 0.0);
}

TEST(Se3Test, RpyYawOnly) {
  Vec3 v = rpy_to_rot({0, 0, kPi / 2}) * Vec3(1, 0, 0);
  EXPECT_NEAR((v - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(Se3Test, RpyMatchesIntrinsicZyxProduct) {
  EulerRPY e{0.3, -0.4, 1.2};
  Rot3 expected = Rot3::about_z(e.yaw) * Rot3::about_y(e.pitch) * Rot3::about_x(e.roll);
  EXPECT_LT(max_abs_diff(rpy_to_rot(e).matrix(), expected.matrix()), 1e-15);
}

TEST(Se3Test, RpyRoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> pitch(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Rot3 r = rpy_to_rot({ang(rng), pitch(rng), ang(rng)});
    Rot3 back = rpy_to_rot(rot_to_rpy(r));
    worst = std::max(worst, max_abs_diff(r.matrix(), back.matrix()));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Se3Test, GimbalLockRejected) {
  EXPECT_THROW(rpy_to_rot({0.1, kPi / 2, 0.0}), GimbalLockError);
  Rot3 r = Rot3::about_y(kPi / 2);
  EXPECT_THROW(rot_to_rpy(r), GimbalLockError);
}

TEST(Se3Test, FromMatrixRejectsReflection) {
  Mat3 m = Mat3::Identity();
  m(2, 2) = -1.0;
  EXPECT_THROW(Rot3::from_matrix(m), InvalidArgumentError);
}

TEST(Se3Test, CompositionIsAssociative) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Pose a = random_pose(rng, "a", "b"), b = random_pose(rng, "b", "c"),
         c = random_pose(rng, "c", "d");
    Pose l = (a * b) * c, r = a * (b * c);
    EXPECT_LT(max_abs_diff(l.rotation.matrix(), r.rotation.matrix()), 1e-12);
    EXPECT_LT((l.translation - r.translation).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Se3Test, InverseCancels) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    Pose p = random_pose(rng, "a", "b");
    Pose id = p.inverse() * p;
    EXPECT_EQ(id.from_frame, "b");
    EXPECT_EQ(id.to_frame, "b");
    EXPECT_LT(max_abs_diff(id.rotation.matrix(), Mat3::Identity()), 1e-12);
    EXPECT_LT(id.translation.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Se3Test, LongChainsStayOrthonormal) {
  std::mt19937_64 rng(17);
  Rot3 r;
  for (int i = 0; i < 1000; ++i) {
    r = r * random_rotation(rng);
    ASSERT_LT(r.depth(), Rot3::kReorthonormalizeEvery);
  }
  EXPECT_LT(r.orthonormality_error(), 1e-9);
  EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-9);
}

TEST(Se3Test, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(3 * kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(2 * kPi + 0.5), 0.5, 1e-15);
}

}  // namespace
}  // namespace slopeland
