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

#include <iosfwd>
#include <string>
#include <vector>

#include "adjplan/types.hpp"

namespace adjplan {

/// Discretized Cartesian path: n + 1 sampling poses, sample interval t_s and
/// communication period t_0 with t_s = cycles_per_sample * t_0.
struct PathSpec {
  std::vector<PoseD> poses;
  double sample_interval = 0.1;
  double comm_period = 0.001;
  int cycles_per_sample = 100;

  /// Index of the last sampling point (n).
  int n() const { return static_cast<int>(poses.size()) - 1; }
  double duration() const { return sample_interval * n(); }

  /// Throws std::invalid_argument when the timing or size invariants fail.
  void validate() const;

  /// Builds a path from poses and timing; derives cycles_per_sample.
  static PathSpec make(std::vector<PoseD> poses, double sample_interval, double comm_period);
};

/// Symmetric adjustment values b_k = k * y_max / o for k = -o..o.
class AdjustmentGrid {
 public:
  AdjustmentGrid(double y_max, int o);

  double y_max() const { return y_max_; }
  int o() const { return o_; }
  int size() const { return 2 * o_ + 1; }
  double spacing() const { return y_max_ / o_; }

  /// Value b_k for signed index k in [-o, o].
  double value(int k) const;
  /// Signed index of the grid value nearest to y; throws outside the range.
  int index(double y) const;
  /// Offset of signed index k into dense storage (0..2o).
  int slot(int k) const { return k + o_; }

 private:
  double y_max_;
  int o_;
};

/// Uniform q7 samples a_1 = lo, ..., a_m = hi (stored zero-based).
class RedundancyGrid {
 public:
  RedundancyGrid(double lo, double hi, int m);
  static RedundancyGrid for_limits(const Limits& limits, int m) {
    return RedundancyGrid(limits.q_min[6], limits.q_max[6], m);
  }

  int m() const { return m_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double value(int j) const;

 private:
  double lo_;
  double hi_;
  int m_;
};

/// Pose translated by y along its own z axis; rotation untouched.
PoseD adjusted_pose(const PoseD& T, double y);

/// Circle of radius 0.1 m about (0.6, 0, 0.1) with the tool pointing down and
/// yawing one full turn; theta(t) = 2*pi*t/duration - pi.
PathSpec circle_path(int n, double duration, double comm_period = 0.001);

/// 101-point circle at z = 0.2 m, 0.1 s between samples.
PathSpec task_path(double comm_period = 0.001);

/// (q_i - q_prev) / t_s.
JointVec joint_velocity(const JointVec& q_i, const JointVec& q_prev, double t_s);

/// Path CSV: header i,r11,...,r33,px,py,pz,t with one row per sampling point.
void write_path_csv(std::ostream& os, const PathSpec& path);
/// Parses a path CSV; t must be uniformly spaced by a multiple of comm_period.
PathSpec read_path_csv(std::istream& is, double comm_period = 0.001);

}  // namespace adjplan
