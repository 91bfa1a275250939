// Copyright 2026 The adjplan Authors.
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

#include <random>
#include <sstream>

#include "adjplan/pathmodel.hpp"

namespace adjplan {
namespace {

void expect_pose(const PoseD& T, const Eigen::Matrix4d& expected) {
  EXPECT_LE((T.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12) << T.matrix();
}

TEST(AdjustedPose, ZeroAdjustmentIsIdentity) {
  const PoseD T = circle_path(100, 10.0).poses[17];
  const PoseD A = adjusted_pose(T, 0.0);
  EXPECT_EQ(A.R, T.R);
  EXPECT_EQ(A.p, T.p);
}

TEST(AdjustedPose, IdentityRotationShiftsAlongZ) {
  const PoseD A = adjusted_pose(PoseD{}, 0.05);
  EXPECT_EQ(A.p, Eigen::Vector3d(0, 0, 0.05));
}

TEST(AdjustedPose, CircleStartMovesDown) {
  const PoseD A = adjusted_pose(circle_path(100, 10.0).poses[0], 0.05);
  EXPECT_NEAR(A.p.x(), 0.5, 1e-12);
  EXPECT_NEAR(A.p.y(), 0.0, 1e-12);
  EXPECT_NEAR(A.p.z(), 0.05, 1e-12);
}

TEST(AdjustedPose, KeepsRotationAndMovesByExactlyY) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  const PathSpec path = circle_path(100, 10.0);
  for (const PoseD& T : path.poses) {
    const double y = u(rng);
    const PoseD A = adjusted_pose(T, y);
    EXPECT_EQ(A.R, T.R);
    EXPECT_NEAR((A.p - T.p).norm(), std::abs(y), 1e-12);
  }
}

TEST(CirclePath, EndpointsAndMidpoint) {
  const PathSpec path = circle_path(100, 10.0);
  ASSERT_EQ(path.n(), 100);
  Eigen::Matrix4d start, mid;
  start << -1, 0, 0, 0.5, 0, 1, 0, 0, 0, 0, -1, 0.1, 0, 0, 0, 1;
  mid << 1, 0, 0, 0.7, 0, -1, 0, 0, 0, 0, -1, 0.1, 0, 0, 0, 1;
  expect_pose(path.poses[0], start);
  expect_pose(path.poses[50], mid);
  EXPECT_EQ(path.poses[100].matrix(), path.poses[0].matrix());
  EXPECT_DOUBLE_EQ(path.sample_interval, 0.1);
  EXPECT_EQ(path.cycles_per_sample, 100);
}

TEST(CirclePath, RejectsEmptyPath) { EXPECT_THROW(circle_path(0, 10.0), std::invalid_argument); }

TEST(TaskPath, KnownPoses) {
  const PathSpec path = task_path();
  ASSERT_EQ(path.n(), 100);
  Eigen::Matrix4d first, half;
  first << 1, 0, 0, 0.7, 0, -1, 0, 0, 0, 0, -1, 0.2, 0, 0, 0, 1;
  half << -1, 0, 0, 0.5, 0, 1, 0, 0, 0, 0, -1, 0.2, 0, 0, 0, 1;
  expect_pose(path.poses[0], first);
  expect_pose(path.poses[50], half);
  EXPECT_EQ(path.poses[100].matrix(), path.poses[0].matrix());
}

TEST(JointVelocity, Arithmetic) {
  JointVec q = JointVec::Constant(0.3);
  EXPECT_EQ(joint_velocity(q, q, 0.1), JointVec::Zero());
  JointVec dq = JointVec::Constant(0.1);
  EXPECT_LE((joint_velocity(q + dq, q, 0.1) - JointVec::Ones()).cwiseAbs().maxCoeff(), 1e-12);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int s = 0; s < 50; ++s) {
    JointVec a, b;
    for (int c = 0; c < kNumJoints; ++c) {
      a[c] = u(rng);
      b[c] = u(rng);
    }
    const JointVec v = joint_velocity(a, b, 0.05);
    for (int c = 0; c < kNumJoints; ++c) EXPECT_DOUBLE_EQ(v[c], (a[c] - b[c]) / 0.05);
  }
  EXPECT_THROW(joint_velocity(q, q, 0.0), std::invalid_argument);
}

TEST(Grids, AdjustmentValuesAndIndices) {
  AdjustmentGrid g(0.05, 10);
  EXPECT_EQ(g.size(), 21);
  EXPECT_DOUBLE_EQ(g.value(-10), -0.05);
  EXPECT_DOUBLE_EQ(g.value(0), 0.0);
  EXPECT_NEAR(g.value(2), 0.01, 1e-15);
  EXPECT_EQ(g.index(0.0149), 3);
  EXPECT_EQ(g.slot(-10), 0);
  EXPECT_THROW(g.index(0.2), std::out_of_range);
}

TEST(Grids, RedundancyEndpoints) {
  RedundancyGrid g = RedundancyGrid::for_limits(Limits::franka(), 61);
  EXPECT_DOUBLE_EQ(g.value(0), -2.8973);
  EXPECT_DOUBLE_EQ(g.value(60), 2.8973);
  EXPECT_NEAR(g.value(30), 0.0, 1e-15);
}

TEST(PathCsv, RoundTrip) {
  const PathSpec path = circle_path(20, 2.0);
  std::stringstream ss;
  write_path_csv(ss, path);
  const PathSpec back = read_path_csv(ss);
  ASSERT_EQ(back.n(), path.n());
  EXPECT_DOUBLE_EQ(back.sample_interval, path.sample_interval);
  for (int i = 0; i <= path.n(); ++i) {
    EXPECT_EQ(back.poses[i].R, path.poses[i].R);
    EXPECT_EQ(back.poses[i].p, path.poses[i].p);
  }
}

TEST(PathSpec, RejectsIntervalNotMultipleOfPeriod) {
  std::vector<PoseD> poses(3);
  EXPECT_THROW(PathSpec::make(poses, 0.0105, 0.001), std::invalid_argument);
  EXPECT_NO_THROW(PathSpec::make(poses, 0.01, 0.001));
}

}  // namespace
}  // namespace adjplan
