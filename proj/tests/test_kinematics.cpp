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

#include "adjplan/kinematics.hpp"
#include "adjplan/pathmodel.hpp"
#include "oracles.hpp"

namespace adjplan {
namespace {

const Model kModel = Model::franka();
const Limits kLimits = Limits::franka();

JointVec random_within(std::mt19937_64& rng, const Limits& limits, double inset = 0) {
  JointVec q;
  for (int c = 0; c < kNumJoints; ++c) {
    std::uniform_real_distribution<double> u(limits.q_min[c] + inset, limits.q_max[c] - inset);
    q[c] = u(rng);
  }
  return q;
}

// Interior sample on the canonical branch.
JointVec random_canonical(std::mt19937_64& rng) {
  Limits box = kLimits;
  box.q_min[1] = 0;
  box.q_max[3] = elbow_split(kModel);
  box.q_min[4] = -std::numbers::pi / 2;
  box.q_max[4] = std::numbers::pi / 2;
  return random_within(rng, box, 0.05);
}

void expect_pose_near(const PoseD& T, const Eigen::Matrix4d& ref, double tol) {
  EXPECT_LE((T.matrix() - ref).cwiseAbs().maxCoeff(), tol);
}

double as_array_fk_error(const JointVec& q) {
  double qa[7];
  for (int c = 0; c < 7; ++c) qa[c] = q[c];
  return (forward_kinematics(kModel, q).matrix() - oracle::fk(qa)).cwiseAbs().maxCoeff();
}

TEST(ForwardKinematics, ZeroConfigurationMatchesOracle) {
  const double zero[7] = {};
  expect_pose_near(forward_kinematics(kModel, JointVec::Zero().eval()), oracle::fk(zero), 1e-12);
  PoseD T = forward_kinematics(kModel, JointVec::Zero().eval());
  EXPECT_NEAR(T.p.x(), 0.088, 1e-12);
  EXPECT_NEAR(T.p.y(), 0.0, 1e-12);
  EXPECT_NEAR(T.p.z(), 0.926, 1e-12);
}

TEST(ForwardKinematics, DegenerateGeometryIsIdentity) {
  Model flat;  // all lengths and twists zero
  PoseD T = forward_kinematics(flat, JointVec::Zero().eval());
  EXPECT_EQ(T.R, Eigen::Matrix3d::Identity());
  EXPECT_EQ(T.p, Eigen::Vector3d::Zero());
}

TEST(ForwardKinematics, RandomConfigurationsMatchOracle) {
  std::mt19937_64 rng(1);
  for (int s = 0; s < 100; ++s) EXPECT_LE(as_array_fk_error(random_within(rng, kLimits)), 1e-12);
}

TEST(Jacobian, MatchesCentralDifferences) {
  std::mt19937_64 rng(2);
  const double h = 1e-6;
  for (int s = 0; s < 100; ++s) {
    const JointVec q = random_within(rng, kLimits);
    const Jacobian<double> J = jacobian(kModel, q);
    for (int c = 0; c < kNumJoints; ++c) {
      JointVec qp = q, qm = q;
      qp[c] += h;
      qm[c] -= h;
      PoseD Tp = forward_kinematics(kModel, qp), Tm = forward_kinematics(kModel, qm);
      Eigen::Vector3d lin = (Tp.p - Tm.p) / (2 * h);
      Eigen::Vector3d ang = oracle::log_so3(Tp.R * Tm.R.transpose()) / (2 * h);
      EXPECT_LE((J.col(c).head<3>() - lin).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LE((J.col(c).tail<3>() - ang).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Jacobian, FirstColumnAtZeroIsAxisCrossLever) {
  const JointVec q = JointVec::Zero();
  const Eigen::Vector3d axis(0, 0, 1), joint1(0, 0, 0.333);
  const Eigen::Vector3d expected = axis.cross(forward_kinematics(kModel, q).p - joint1);
  EXPECT_LE((jacobian(kModel, q).col(0).head<3>() - expected).norm(), 1e-12);
  EXPECT_NEAR(expected.y(), 0.088, 1e-12);
}

TEST(Jacobian, ZeroRatesGiveZeroTwist) {
  std::mt19937_64 rng(3);
  EXPECT_EQ((jacobian(kModel, random_within(rng, kLimits)) * JointVec::Zero()).norm(), 0.0);
}

TEST(Singularity, HugeToleranceAlwaysSingular) {
  std::mt19937_64 rng(4);
  EXPECT_TRUE(is_singular(kModel, random_within(rng, kLimits), 1e9));
}

TEST(Singularity, AgreesWithEigenvalueOracle) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 100; ++s) {
    const JointVec q = random_within(rng, kLimits);
    const auto J = jacobian(kModel, q);
    EXPECT_NEAR(smallest_singular_value(J), oracle::sigma_min(J), 1e-7);
  }
  // q = 0 stacks the first and third axes on one line.
  const JointVec zero = JointVec::Zero();
  EXPECT_LT(oracle::sigma_min(jacobian(kModel, zero)), 1e-7);
  EXPECT_EQ(is_singular(kModel, zero, 1e-3), oracle::sigma_min(jacobian(kModel, zero)) < 1e-3);
}

TEST(Singularity, StretchedArmIsSingular) {
  JointVec q;
  q << 0.3, 0.5, 0.2, elbow_split(kModel), 0.1, 1.0, 0.0;
  EXPECT_LT(oracle::sigma_min(jacobian(kModel, q)), 1e-3);
  EXPECT_TRUE(is_singular(kModel, q, 1e-3));
}

TEST(InverseKinematics, RoundTripOnCanonicalBranch) {
  std::mt19937_64 rng(6);
  IkOptions opts;
  int tried = 0, recovered = 0;
  for (int s = 0; s < 1000; ++s) {
    const JointVec q = random_canonical(rng);
    if (smallest_singular_value(jacobian(kModel, q)) < 2 * opts.singular_tol) continue;
    ++tried;
    auto got = ik_parameterized(kModel, forward_kinematics(kModel, q), q[6], kLimits, opts);
    if (got && (*got - q).cwiseAbs().maxCoeff() <= 1e-6) ++recovered;
    if (got) {
      EXPECT_EQ((*got)[6], q[6]);
    }
  }
  EXPECT_GT(tried, 900);
  EXPECT_EQ(recovered, tried);
}

TEST(InverseKinematics, EveryCandidateReproducesThePose) {
  std::mt19937_64 rng(7);
  for (int s = 0; s < 100; ++s) {
    const JointVec q = random_within(rng, kLimits);
    const PoseD T = forward_kinematics(kModel, q);
    auto cands = ik_candidates(kModel, T, q[6]);
    bool found = false;
    for (const JointVec& c : cands) {
      auto [ep, er] = pose_error(forward_kinematics(kModel, c), T);
      if (ep < 1e-8 && er < 1e-8) {
        JointVec d = c - q;
        for (int k = 0; k < kNumJoints; ++k) d[k] = std::remainder(d[k], 2 * std::numbers::pi);
        found = found || d.cwiseAbs().maxCoeff() < 1e-6;
      }
    }
    if (smallest_singular_value(jacobian(kModel, q)) > 1e-3) {
      EXPECT_TRUE(found) << "sample " << s;
    }
  }
}

TEST(InverseKinematics, UnreachablePoseIsEmpty) {
  PoseD T = forward_kinematics(kModel, JointVec::Zero().eval());
  T.p += Eigen::Vector3d(10, 0, 0);
  EXPECT_FALSE(ik_branch(kModel, T, 0.0, kLimits).has_value());
  EXPECT_FALSE(ik_parameterized(kModel, T, 0.0, kLimits).has_value());
}

TEST(InverseKinematics, Q7OutsideBoundsIsEmpty) {
  std::mt19937_64 rng(8);
  const JointVec q = random_canonical(rng);
  EXPECT_FALSE(ik_parameterized(kModel, forward_kinematics(kModel, q), kLimits.q_max[6] + 0.01, kLimits));
  EXPECT_FALSE(ik_parameterized(kModel, forward_kinematics(kModel, q), kLimits.q_min[6] - 0.01, kLimits));
}

// Damped least squares on joints 1..6 with q7 held, using the oracle chain
// and a finite-difference Jacobian.
std::optional<JointVec> dls_solve(const PoseD& target, JointVec q, int iterations = 400) {
  auto residual = [&](const JointVec& x) {
    double qa[7];
    for (int c = 0; c < 7; ++c) qa[c] = x[c];
    Eigen::Matrix4d T = oracle::fk(qa);
    Eigen::Matrix<double, 6, 1> r;
    r.head<3>() = target.p - T.topRightCorner<3, 1>();
    Eigen::Matrix3d R = T.topLeftCorner<3, 3>();
    r.tail<3>() = oracle::log_so3(target.R * R.transpose());
    return r;
  };
  for (int it = 0; it < iterations; ++it) {
    auto r = residual(q);
    if (r.norm() < 1e-12) return q;
    Eigen::Matrix<double, 6, 6> J;
    for (int c = 0; c < 6; ++c) {
      JointVec qp = q, qm = q;
      qp[c] += 1e-7;
      qm[c] -= 1e-7;
      J.col(c) = -(residual(qp) - residual(qm)) / 2e-7;
    }
    const double lambda = r.norm() > 1e-3 ? 1e-2 : 1e-6;
    Eigen::Matrix<double, 6, 1> dq =
        J.transpose() * (J * J.transpose() + lambda * lambda * Eigen::Matrix<double, 6, 6>::Identity()).ldlt().solve(r);
    if (dq.norm() > 0.3) dq *= 0.3 / dq.norm();
    q.head<6>() += dq;
  }
  return residual(q).norm() < 1e-10 ? std::optional<JointVec>(q) : std::nullopt;
}

TEST(InverseKinematics, CirclePoseExistenceMatchesNumericalOracle) {
  const PathSpec path = circle_path(100, 10.0);
  const PoseD& T = path.poses[0];
  const RedundancyGrid grid = RedundancyGrid::for_limits(kLimits, 61);
  IkOptions opts;
  std::mt19937_64 rng(9);
  int feasible = 0;
  for (int j = 0; j < grid.m(); ++j) {
    const double q7 = grid.value(j);
    std::optional<JointVec> numeric;
    for (int seed = 0; seed < 40 && !numeric; ++seed) {
      JointVec q0 = random_canonical(rng);
      q0[6] = q7;
      auto sol = dls_solve(T, q0);
      if (!sol) continue;
      JointVec q = *sol;
      for (int c = 0; c < 6; ++c) q[c] = std::remainder(q[c], 2 * std::numbers::pi);
      auto fitted = fit_into_limits(q, kLimits);
      if (fitted && in_canonical_branch(kModel, *fitted) &&
          smallest_singular_value(jacobian(kModel, *fitted)) >= opts.singular_tol)
        numeric = fitted;
    }
    auto closed = ik_parameterized(kModel, T, q7, kLimits, opts);
    EXPECT_EQ(closed.has_value(), numeric.has_value()) << "q7 = " << q7;
    if (closed && numeric) {
      EXPECT_LE((*closed - *numeric).cwiseAbs().maxCoeff(), 1e-6) << "q7 = " << q7;
    }
    feasible += closed.has_value();
  }
  EXPECT_GT(feasible, 0);
}

}  // namespace
}  // namespace adjplan
