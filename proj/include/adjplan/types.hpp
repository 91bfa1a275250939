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

#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace adjplan {

inline constexpr int kNumJoints = 7;

template <typename Scalar>
using JointVector = Eigen::Matrix<Scalar, kNumJoints, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Jacobian = Eigen::Matrix<Scalar, 6, kNumJoints>;

/// Homogeneous end-effector transform split into rotation and translation.
template <typename Scalar>
struct Pose {
  Matrix3<Scalar> R = Matrix3<Scalar>::Identity();
  Vector3<Scalar> p = Vector3<Scalar>::Zero();

  static Pose from_matrix(const Matrix4<Scalar>& T) {
    return Pose{T.template topLeftCorner<3, 3>(), T.template topRightCorner<3, 1>()};
  }

  Matrix4<Scalar> matrix() const {
    Matrix4<Scalar> T = Matrix4<Scalar>::Identity();
    T.template topLeftCorner<3, 3>() = R;
    T.template topRightCorner<3, 1>() = p;
    return T;
  }

  /// Tool axis (third column of R).
  Vector3<Scalar> z_axis() const { return R.col(2); }

  Pose operator*(const Pose& rhs) const { return Pose{R * rhs.R, R * rhs.p + p}; }

  Pose inverse() const {
    Matrix3<Scalar> Rt = R.transpose();
    return Pose{Rt, -Rt * p};
  }
};

/// Max deviation of R from SO(3): max(|R^T R - I|_max, |det R - 1|).
template <typename Scalar>
Scalar rotation_defect(const Matrix3<Scalar>& R) {
  using std::abs;
  using std::max;
  Scalar orth = (R.transpose() * R - Matrix3<Scalar>::Identity()).cwiseAbs().maxCoeff();
  return max(orth, Scalar(abs(R.determinant() - Scalar(1))));
}

/// Per-joint bounds on angle, velocity, acceleration and jerk.
template <typename Scalar>
struct JointLimits {
  JointVector<Scalar> q_min;
  JointVector<Scalar> q_max;
  JointVector<Scalar> qd_max;
  JointVector<Scalar> qdd_max;
  JointVector<Scalar> qddd_max;

  /// Franka Emika Panda datasheet limits.
  static JointLimits franka() {
    JointLimits l;
    l.q_max << 2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973;
    l.q_min << -2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175, -2.8973;
    l.qd_max << 2.1750, 2.1750, 2.1750, 2.1750, 2.6100, 2.6100, 2.6100;
    l.qdd_max << 15, 7.5, 10, 12.5, 15, 20, 20;
    l.qddd_max << 7500, 3750, 5000, 6250, 7500, 10000, 10000;
    return l;
  }

  void validate() const {
    for (int c = 0; c < kNumJoints; ++c) {
      if (!(q_min[c] < q_max[c])) throw std::invalid_argument("joint limits: q_min must be below q_max");
      if (!(qd_max[c] > 0) || !(qdd_max[c] > 0) || !(qddd_max[c] > 0))
        throw std::invalid_argument("joint limits: rate bounds must be positive");
    }
  }

  bool within_angles(const JointVector<Scalar>& q) const {
    return (q.array() >= q_min.array()).all() && (q.array() <= q_max.array()).all();
  }

  /// Angle bounds shrunk by a per-joint margin.
  JointLimits reduced(const JointVector<Scalar>& margin) const {
    JointLimits r = *this;
    r.q_min += margin;
    r.q_max -= margin;
    return r;
  }
};

using JointVec = JointVector<double>;
using PoseD = Pose<double>;
using Limits = JointLimits<double>;

}  // namespace adjplan
