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

#include "adjplan/feasibility.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "adjplan/csv.hpp"

namespace adjplan {

FeasibilityGrid::FeasibilityGrid(int num_points, RedundancyGrid q7_grid, AdjustmentGrid adjust_grid)
    : num_points_(num_points), q7_grid_(q7_grid), adjust_grid_(adjust_grid) {
  if (num_points < 2) throw std::invalid_argument("feasibility grid needs at least two sampling points");
  size_t cells = static_cast<size_t>(num_points) * q7_grid_.m() * adjust_grid_.size();
  present_.assign(cells, 0);
  joints_.assign(cells * kNumJoints, 0.0);
}

size_t FeasibilityGrid::offset(int i, int j, int k) const {
  if (!in_range(i, j, k)) throw std::out_of_range("feasibility grid index out of range");
  return (static_cast<size_t>(i) * m() + j) * adjust_grid_.size() + adjust_grid_.slot(k);
}

JointVec FeasibilityGrid::at(int i, int j, int k) const {
  size_t off = offset(i, j, k);
  if (!present_[off]) throw std::logic_error("feasibility grid: cell is infeasible");
  return Eigen::Map<const JointVec>(&joints_[off * kNumJoints]);
}

void FeasibilityGrid::set(int i, int j, int k, const std::optional<JointVec>& q) {
  size_t off = offset(i, j, k);
  present_[off] = q.has_value();
  Eigen::Map<JointVec> dst(&joints_[off * kNumJoints]);
  if (q)
    dst = *q;
  else
    dst.setZero();
}

size_t FeasibilityGrid::count_present() const {
  return static_cast<size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

bool FeasibilityGrid::operator==(const FeasibilityGrid& other) const {
  return num_points_ == other.num_points_ && m() == other.m() && o() == other.o() &&
         q7_grid_.lo() == other.q7_grid_.lo() && q7_grid_.hi() == other.q7_grid_.hi() &&
         adjust_grid_.y_max() == other.adjust_grid_.y_max() && present_ == other.present_ &&
         joints_ == other.joints_;
}

FeasibilityGrid build_grid(const Model& model, const PathSpec& path, const RedundancyGrid& q7_grid,
                           const AdjustmentGrid& adjust_grid, const Limits& limits, const IkOptions& ik) {
  path.validate();
  limits.validate();
  FeasibilityGrid grid(path.n() + 1, q7_grid, adjust_grid);
  for (int i = 0; i <= path.n(); ++i) {
    for (int k = -adjust_grid.o(); k <= adjust_grid.o(); ++k) {
      const PoseD target = adjusted_pose(path.poses[i], adjust_grid.value(k));
      for (int j = 0; j < q7_grid.m(); ++j)
        grid.set(i, j, k, ik_parameterized(model, target, q7_grid.value(j), limits, ik));
    }
  }
  return grid;
}

void export_atlas(std::ostream& os, const FeasibilityGrid& grid) {
  os << "i,j,k,feasible,q1,q2,q3,q4,q5,q6,q7\n";
  for (int i = 0; i < grid.num_points(); ++i)
    for (int j = 0; j < grid.m(); ++j)
      for (int k = -grid.o(); k <= grid.o(); ++k) {
        os << i << ',' << j << ',' << k << ',';
        if (grid.present(i, j, k)) {
          os << '1';
          JointVec q = grid.at(i, j, k);
          for (int c = 0; c < kNumJoints; ++c) os << ',' << csv::num(q[c]);
        } else {
          os << "0,,,,,,,";
        }
        os << '\n';
      }
}

FeasibilityGrid import_atlas(std::istream& is, const RedundancyGrid& q7_grid, const AdjustmentGrid& adjust_grid) {
  csv::Reader reader(is, {"i", "j", "k", "feasible", "q1", "q2", "q3", "q4", "q5", "q6", "q7"});
  struct Row {
    int i, j, k;
    std::optional<JointVec> q;
  };
  std::vector<Row> rows;
  int max_i = -1;
  while (auto f = reader.next()) {
    Row row{static_cast<int>(csv::to_long((*f)[0])), static_cast<int>(csv::to_long((*f)[1])),
            static_cast<int>(csv::to_long((*f)[2])), std::nullopt};
    long feasible = csv::to_long((*f)[3]);
    if (feasible == 1) {
      JointVec q;
      for (int c = 0; c < kNumJoints; ++c) q[c] = csv::to_double((*f)[4 + c]);
      row.q = q;
    } else if (feasible != 0) {
      throw std::runtime_error("atlas CSV: feasible must be 0 or 1");
    }
    max_i = std::max(max_i, row.i);
    rows.push_back(std::move(row));
  }
  FeasibilityGrid grid(max_i + 1, q7_grid, adjust_grid);
  if (rows.size() != grid.num_cells()) throw std::runtime_error("atlas CSV: row count does not match grid dims");
  for (const auto& row : rows) grid.set(row.i, row.j, row.k, row.q);
  return grid;
}

std::vector<CellFault> audit_grid(const FeasibilityGrid& grid, const Model& model, const PathSpec& path,
                                  const Limits& limits, const IkOptions& ik) {
  std::vector<CellFault> faults;
  for (int i = 0; i < grid.num_points(); ++i)
    for (int j = 0; j < grid.m(); ++j)
      for (int k = -grid.o(); k <= grid.o(); ++k) {
        if (!grid.present(i, j, k)) continue;
        JointVec q = grid.at(i, j, k);
        PoseD target = adjusted_pose(path.poses[i], grid.adjust_grid().value(k));
        auto [ep, er] = pose_error(forward_kinematics(model, q), target);
        bool ok = ep <= ik.fk_tol && er <= ik.fk_tol && q[6] == grid.q7_grid().value(j) &&
                  limits.within_angles(q) && !is_singular(model, q, ik.singular_tol);
        if (!ok) faults.push_back({i, j, k});
      }
  return faults;
}

}  // namespace adjplan
