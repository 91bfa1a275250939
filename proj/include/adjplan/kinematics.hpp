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

// Modified Denavit-Hartenberg model of the Franka Emika Panda: forward
// kinematics, geometric Jacobian, singularity test and the closed-form inverse
// kinematics parameterized by the seventh joint angle.
//
// Link transform convention (Craig): A_i = RotX(alpha_i) TransX(a_i)
// RotZ(q_i + theta_offset_i) TransZ(d_i), where (a_i, alpha_i) are the values
// that precede joint i in the chain.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "adjplan/types.hpp"

namespace adjplan {

template <typename Scalar>
struct DHLink {
  Scalar a = 0;
  Scalar d = 0;
  Scalar alpha = 0;
  Scalar theta_offset = 0;
};

template <typename Scalar>
struct DHModel {
  std::array<DHLink<Scalar>, kNumJoints> joints{};
  DHLink<Scalar> flange{};

  static DHModel franka() {
    constexpr Scalar pi2 = std::numbers::pi_v<Scalar> / 2;
    DHModel m;
    m.joints[0] = {0, 0.333, 0, 0};
    m.joints[1] = {0, 0, -pi2, 0};
    m.joints[2] = {0, 0.316, pi2, 0};
    m.joints[3] = {0.0825, 0, pi2, 0};
    m.joints[4] = {-0.0825, 0.384, -pi2, 0};
    m.joints[5] = {0, 0, pi2, 0};
    m.joints[6] = {0.088, 0, pi2, 0};
    m.flange = {0, 0.107, 0, 0};
    return m;
  }
};

using Model = DHModel<double>;

namespace detail {

template <typename Scalar>
Matrix3<Scalar> rot_x(Scalar angle) {
  using std::cos;
  using std::sin;
  Matrix3<Scalar> R;
  R << 1, 0, 0, 0, cos(angle), -sin(angle), 0, sin(angle), cos(angle);
  return R;
}

template <typename Scalar>
Matrix3<Scalar> rot_z(Scalar angle) {
  using std::cos;
  using std::sin;
  Matrix3<Scalar> R;
  R << cos(angle), -sin(angle), 0, sin(angle), cos(angle), 0, 0, 0, 1;
  return R;
}

template <typename Scalar>
Scalar wrap_pi(Scalar angle) {
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  angle = std::remainder(angle, two_pi);
  return angle;
}

/// Angle theta such that Rx(alpha)^T * R_rel == Rz(theta).
template <typename Scalar>
Scalar joint_angle_from(const Matrix3<Scalar>& R_rel, Scalar alpha) {
  Matrix3<Scalar> N = rot_x(alpha).transpose() * R_rel;
  return std::atan2(N(1, 0), N(0, 0));
}

}  // namespace detail

/// Transform of one modified-DH link at joint angle q.
template <typename Scalar>
Pose<Scalar> dh_transform(const DHLink<Scalar>& link, Scalar q) {
  Pose<Scalar> T;
  Matrix3<Scalar> Rx = detail::rot_x(link.alpha);
  T.R = Rx * detail::rot_z(q + link.theta_offset);
  T.p = Vector3<Scalar>(link.a, 0, 0) + T.R * Vector3<Scalar>(0, 0, link.d);
  return T;
}

/// Base-relative frames of joints 1..7 followed by the flange frame.
template <typename Scalar>
std::array<Pose<Scalar>, kNumJoints + 1> link_frames(const DHModel<Scalar>& model,
                                                     const JointVector<Scalar>& q) {
  std::array<Pose<Scalar>, kNumJoints + 1> frames;
  Pose<Scalar> T;
  for (int c = 0; c < kNumJoints; ++c) {
    T = T * dh_transform(model.joints[c], q[c]);
    frames[c] = T;
  }
  frames[kNumJoints] = T * dh_transform(model.flange, Scalar(0));
  return frames;
}

template <typename Scalar>
Pose<Scalar> forward_kinematics(const DHModel<Scalar>& model, const JointVector<Scalar>& q) {
  return link_frames(model, q)[kNumJoints];
}

/// Geometric Jacobian in the base frame; rows 0-2 linear, rows 3-5 angular.
template <typename Scalar>
Jacobian<Scalar> jacobian(const DHModel<Scalar>& model, const JointVector<Scalar>& q) {
  auto frames = link_frames(model, q);
  const Vector3<Scalar> p_ee = frames[kNumJoints].p;
  Jacobian<Scalar> J;
  for (int c = 0; c < kNumJoints; ++c) {
    Vector3<Scalar> z = frames[c].R.col(2);
    J.template block<3, 1>(0, c) = z.cross(p_ee - frames[c].p);
    J.template block<3, 1>(3, c) = z;
  }
  return J;
}

template <typename Scalar>
Scalar smallest_singular_value(const Jacobian<Scalar>& J) {
  Eigen::JacobiSVD<Jacobian<Scalar>> svd(J);
  return svd.singularValues().minCoeff();
}

template <typename Scalar>
bool is_singular(const DHModel<Scalar>& model, const JointVector<Scalar>& q, Scalar tol) {
  return smallest_singular_value(jacobian(model, q)) < tol;
}

struct IkOptions {
  double singular_tol = 1e-4;
  /// Acceptance threshold on the position error (m) and rotation error
  /// (Frobenius) of the recomputed forward kinematics.
  double fk_tol = 1e-9;
};

/// q4 value at which the arm is fully stretched; it separates the two elbow
/// branches.
template <typename Scalar>
Scalar elbow_split(const DHModel<Scalar>& model) {
  const Scalar d3 = model.joints[2].d, d5 = model.joints[4].d;
  const Scalar a4 = model.joints[3].a, a5 = model.joints[4].a;
  return std::atan2(2 * (d3 * a5 - a4 * d5), 2 * (a4 * a5 + d3 * d5)) - model.joints[3].theta_offset;
}

/// Branch restrictions that make the q7-parameterized inverse unique:
/// shoulder q2 >= 0, elbow q4 on the bent side of elbow_split, wrist cos(q5) >= 0.
template <typename Scalar>
bool in_canonical_branch(const DHModel<Scalar>& model, const JointVector<Scalar>& q) {
  return q[1] >= 0 && q[3] <= elbow_split(model) && std::cos(q[4]) >= 0;
}

/// Every analytic solution of FK(q) = T with q[6] == q7, ignoring joint limits.
/// Angles are wrapped to [-pi, pi]. Degenerate parameterizations (shoulder
/// axis alignment, wrist centre on the z5 axis) produce no solution.
template <typename Scalar>
std::vector<JointVector<Scalar>> ik_candidates(const DHModel<Scalar>& model, const Pose<Scalar>& T,
                                               Scalar q7) {
  using std::abs;
  using std::atan2;
  using std::sqrt;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar eps = 1e-12;

  const auto& J = model.joints;
  const Scalar d1 = J[0].d, d3 = J[2].d, d5 = J[4].d;
  const Scalar a4 = J[3].a, a5 = J[4].a;

  std::vector<JointVector<Scalar>> out;
  const Pose<Scalar> T7 = T * dh_transform(model.flange, Scalar(0)).inverse();
  const Pose<Scalar> T6 = T7 * dh_transform(J[6], q7).inverse();
  const Vector3<Scalar> o2(0, 0, d1);
  const Vector3<Scalar> w = o2 - T6.p;  // wrist centre to shoulder

  // |w|^2 depends on the elbow angle only: A cos(t4) + B sin(t4) = |w|^2 - K.
  const Scalar K = a4 * a4 + d3 * d3 + a5 * a5 + d5 * d5;
  const Scalar A = 2 * (a4 * a5 + d3 * d5);
  const Scalar B = 2 * (d3 * a5 - a4 * d5);
  const Scalar cos_arg = (w.squaredNorm() - K) / sqrt(A * A + B * B);
  if (cos_arg > 1 || cos_arg < -1) return out;
  const Scalar phi4 = atan2(B, A);
  const Scalar spread4 = std::acos(cos_arg);

  const Vector3<Scalar> v = T6.R.transpose() * w;
  const Scalar r6 = std::hypot(v.x(), v.y());
  if (r6 < eps) return out;
  const Scalar phi6 = atan2(v.y(), v.x());

  for (Scalar t4 : {phi4 - spread4, phi4 + spread4}) {
    const Scalar c4 = std::cos(t4), s4 = std::sin(t4);
    // Components of w along x4 and along y4 (= z5); w has none along z4.
    const Scalar X = -(a4 * c4 + d3 * s4 + a5);
    const Scalar D = -(d5 + d3 * c4 - a4 * s4);
    if (abs(X) < eps || abs(D) > r6) continue;
    const Scalar beta = std::asin(D / r6);
    for (Scalar t6 : {beta - phi6, pi - beta - phi6}) {
      const Vector3<Scalar> z5 = T6.R * Vector3<Scalar>(std::sin(t6), std::cos(t6), 0);
      const Vector3<Scalar> x4 = ((w - D * z5) / X).normalized();
      Matrix3<Scalar> R4;
      R4.col(0) = x4;
      R4.col(1) = z5;
      R4.col(2) = x4.cross(z5);
      const Matrix3<Scalar> R03 = R4 * (detail::rot_x(J[3].alpha) * detail::rot_z(t4)).transpose();
      const Matrix3<Scalar> R5 = T6.R * (detail::rot_x(J[5].alpha) * detail::rot_z(t6)).transpose();
      const Scalar t5 = detail::joint_angle_from<Scalar>(R4.transpose() * R5, J[4].alpha);
      const Vector3<Scalar> z3 = R03.col(2);
      const Scalar t2_abs = std::acos(std::clamp(z3.z(), Scalar(-1), Scalar(1)));
      for (Scalar sign : {Scalar(1), Scalar(-1)}) {
        const Scalar t2 = sign * t2_abs;
        const Scalar s2 = std::sin(t2);
        if (abs(s2) < eps) continue;
        const Scalar t1 = atan2(z3.y() / s2, z3.x() / s2);
        const Matrix3<Scalar> R02 = detail::rot_x(J[0].alpha) * detail::rot_z(t1) *
                                    detail::rot_x(J[1].alpha) * detail::rot_z(t2);
        const Scalar t3 = detail::joint_angle_from<Scalar>(R02.transpose() * R03, J[2].alpha);
        JointVector<Scalar> q;
        q << t1, t2, t3, t4, t5, t6, q7 + J[6].theta_offset;
        for (int c = 0; c < kNumJoints - 1; ++c) q[c] = detail::wrap_pi(q[c] - J[c].theta_offset);
        q[6] = q7;
        out.push_back(q);
      }
    }
  }
  return out;
}

/// Position and Frobenius rotation error between two poses.
template <typename Scalar>
std::pair<Scalar, Scalar> pose_error(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  return {(a.p - b.p).norm(), (a.R - b.R).norm()};
}

/// Shifts each joint by multiples of 2*pi into its angle interval when possible.
template <typename Scalar>
std::optional<JointVector<Scalar>> fit_into_limits(JointVector<Scalar> q, const JointLimits<Scalar>& limits) {
  constexpr Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  for (int c = 0; c < kNumJoints; ++c) {
    if (q[c] < limits.q_min[c] && q[c] + two_pi <= limits.q_max[c]) q[c] += two_pi;
    if (q[c] > limits.q_max[c] && q[c] - two_pi >= limits.q_min[c]) q[c] -= two_pi;
    if (q[c] < limits.q_min[c] || q[c] > limits.q_max[c]) return std::nullopt;
  }
  return q;
}

/// First six joint angles of the canonical solution for pose T with the
/// seventh joint fixed to q7, or empty when no limit-respecting, non-singular
/// canonical solution exists.
template <typename Scalar>
std::optional<Eigen::Matrix<Scalar, 6, 1>> ik_branch(const DHModel<Scalar>& model, const Pose<Scalar>& T,
                                                     Scalar q7, const JointLimits<Scalar>& limits,
                                                     const IkOptions& opts = {}) {
  std::optional<JointVector<Scalar>> best;
  for (const auto& raw : ik_candidates(model, T, q7)) {
    auto q = fit_into_limits(raw, limits);
    if (!q || !in_canonical_branch(model, *q)) continue;
    auto [ep, er] = pose_error(forward_kinematics(model, *q), T);
    if (!(ep <= opts.fk_tol && er <= opts.fk_tol)) continue;
    if (is_singular(model, *q, Scalar(opts.singular_tol))) continue;
    // The canonical restrictions leave at most one candidate; the
    // lexicographic tie-break only guards against duplicates at branch seams.
    if (!best || std::lexicographical_compare(q->begin(), q->end(), best->begin(), best->end())) best = q;
  }
  if (!best) return std::nullopt;
  return best->template head<6>().eval();
}

/// Full joint vector [ik_branch(T, q7); q7], empty outside the joint-7 bounds.
template <typename Scalar>
std::optional<JointVector<Scalar>> ik_parameterized(const DHModel<Scalar>& model, const Pose<Scalar>& T,
                                                    Scalar q7, const JointLimits<Scalar>& limits,
                                                    const IkOptions& opts = {}) {
  if (!(q7 >= limits.q_min[6] && q7 <= limits.q_max[6])) return std::nullopt;
  auto head = ik_branch(model, T, q7, limits, opts);
  if (!head) return std::nullopt;
  JointVector<Scalar> q;
  q << *head, q7;
  return q;
}

}  // namespace adjplan
