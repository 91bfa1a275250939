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

#include "adjplan/pathmodel.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "adjplan/csv.hpp"

namespace adjplan {

namespace {

constexpr double kPi = std::numbers::pi;

// Integer k with t_s == k * t_0, or 0 when t_s is not a whole multiple.
int whole_cycles(double sample_interval, double comm_period) {
  double ratio = sample_interval / comm_period;
  double k = std::round(ratio);
  if (k < 1 || std::abs(ratio - k) > 1e-9 * std::max(1.0, k)) return 0;
  return static_cast<int>(k);
}

PoseD circle_pose(double theta, double z) {
  PoseD T;
  const double c = std::cos(theta), s = std::sin(theta);
  T.R << c, s, 0, s, -c, 0, 0, 0, -1;
  T.p << 0.6 + 0.1 * c, 0.1 * s, z;
  return T;
}

}  // namespace

void PathSpec::validate() const {
  if (poses.size() < 2) throw std::invalid_argument("path needs at least two sampling points");
  if (!(sample_interval > 0) || !(comm_period > 0))
    throw std::invalid_argument("path timing must be positive");
  int k = whole_cycles(sample_interval, comm_period);
  if (k == 0 || k != cycles_per_sample)
    throw std::invalid_argument("sample interval must be a whole multiple of the communication period");
  for (const auto& T : poses)
    if (rotation_defect(T.R) > 1e-9) throw std::invalid_argument("path pose rotation is not orthonormal");
}

PathSpec PathSpec::make(std::vector<PoseD> poses, double sample_interval, double comm_period) {
  PathSpec path;
  path.poses = std::move(poses);
  path.sample_interval = sample_interval;
  path.comm_period = comm_period;
  path.cycles_per_sample = whole_cycles(sample_interval, comm_period);
  path.validate();
  return path;
}

AdjustmentGrid::AdjustmentGrid(double y_max, int o) : y_max_(y_max), o_(o) {
  if (o < 1) throw std::invalid_argument("adjustment grid needs o >= 1");
  if (!(y_max > 0)) throw std::invalid_argument("adjustment range must be positive");
}

double AdjustmentGrid::value(int k) const {
  if (k < -o_ || k > o_) throw std::out_of_range("adjustment index outside [-o, o]");
  return k * y_max_ / o_;
}

int AdjustmentGrid::index(double y) const {
  int k = static_cast<int>(std::lround(y / spacing()));
  if (k < -o_ || k > o_) throw std::out_of_range("adjustment value outside [-y_max, y_max]");
  return k;
}

RedundancyGrid::RedundancyGrid(double lo, double hi, int m) : lo_(lo), hi_(hi), m_(m) {
  if (m < 2) throw std::invalid_argument("redundancy grid needs m >= 2");
  if (!(lo < hi)) throw std::invalid_argument("redundancy grid needs lo < hi");
}

double RedundancyGrid::value(int j) const {
  if (j < 0 || j >= m_) throw std::out_of_range("redundancy index outside [0, m)");
  if (j == m_ - 1) return hi_;
  return lo_ + (hi_ - lo_) * j / (m_ - 1);
}

PoseD adjusted_pose(const PoseD& T, double y) {
  PoseD out = T;
  out.p = T.p + y * T.R.col(2);
  return out;
}

PathSpec circle_path(int n, double duration, double comm_period) {
  if (n < 1) throw std::invalid_argument("circle path needs n >= 1");
  if (!(duration > 0)) throw std::invalid_argument("circle path duration must be positive");
  std::vector<PoseD> poses;
  poses.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    // Endpoints evaluated exactly so that the closed path repeats its pose.
    double theta = (i == n) ? -kPi : 2 * kPi * i / n - kPi;
    poses.push_back(circle_pose(theta, 0.1));
  }
  return PathSpec::make(std::move(poses), duration / n, comm_period);
}

PathSpec task_path(double comm_period) {
  std::vector<PoseD> poses;
  poses.reserve(101);
  for (int i = 0; i <= 100; ++i) poses.push_back(circle_pose(i == 100 ? 0.0 : 2 * kPi * i / 100, 0.2));
  return PathSpec::make(std::move(poses), 0.1, comm_period);
}

JointVec joint_velocity(const JointVec& q_i, const JointVec& q_prev, double t_s) {
  if (!(t_s > 0)) throw std::invalid_argument("sample interval must be positive");
  return (q_i - q_prev) / t_s;
}

void write_path_csv(std::ostream& os, const PathSpec& path) {
  os << "i,r11,r12,r13,r21,r22,r23,r31,r32,r33,px,py,pz,t\n";
  for (int i = 0; i <= path.n(); ++i) {
    const auto& T = path.poses[i];
    os << i;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) os << ',' << csv::num(T.R(r, c));
    for (int r = 0; r < 3; ++r) os << ',' << csv::num(T.p[r]);
    os << ',' << csv::num(i * path.sample_interval) << '\n';
  }
}

PathSpec read_path_csv(std::istream& is, double comm_period) {
  csv::Reader reader(is, {"i", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33", "px", "py", "pz", "t"});
  std::vector<PoseD> poses;
  std::vector<double> times;
  long last_i = -1;
  while (auto row = reader.next()) {
    long i = csv::to_long((*row)[0]);
    if (i <= last_i) throw std::runtime_error("path CSV: row index must strictly increase");
    last_i = i;
    PoseD T;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) T.R(r, c) = csv::to_double((*row)[1 + 3 * r + c]);
    for (int r = 0; r < 3; ++r) T.p[r] = csv::to_double((*row)[10 + r]);
    poses.push_back(T);
    times.push_back(csv::to_double((*row)[13]));
  }
  if (times.size() < 2) throw std::runtime_error("path CSV: need at least two rows");
  double dt = times[1] - times[0];
  for (size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9)
      throw std::runtime_error("path CSV: sampling times must be uniformly spaced");
  return PathSpec::make(std::move(poses), dt, comm_period);
}

}  // namespace adjplan
