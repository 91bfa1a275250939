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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "adjplan/kinematics.hpp"
#include "adjplan/pathmodel.hpp"

namespace adjplan {

/// Dense (i, j, k) atlas of inverse-kinematics solutions: cell (i, j, k) holds
/// the canonical solution for sampling pose i shifted by b_k along its tool
/// axis with q7 = a_j, or nothing when no admissible solution exists.
///
/// i runs over 0..n, j over 0..m-1 (zero-based q7 index), k over -o..o.
class FeasibilityGrid {
 public:
  FeasibilityGrid(int num_points, RedundancyGrid q7_grid, AdjustmentGrid adjust_grid);

  int num_points() const { return num_points_; }
  int n() const { return num_points_ - 1; }
  int m() const { return q7_grid_.m(); }
  int o() const { return adjust_grid_.o(); }
  const RedundancyGrid& q7_grid() const { return q7_grid_; }
  const AdjustmentGrid& adjust_grid() const { return adjust_grid_; }
  size_t num_cells() const { return present_.size(); }

  bool in_range(int i, int j, int k) const {
    return i >= 0 && i < num_points_ && j >= 0 && j < m() && k >= -o() && k <= o();
  }
  bool present(int i, int j, int k) const { return present_[offset(i, j, k)] != 0; }
  /// Joint vector of a present cell.
  JointVec at(int i, int j, int k) const;
  void set(int i, int j, int k, const std::optional<JointVec>& q);

  size_t count_present() const;
  bool operator==(const FeasibilityGrid& other) const;

 private:
  size_t offset(int i, int j, int k) const;

  int num_points_;
  RedundancyGrid q7_grid_;
  AdjustmentGrid adjust_grid_;
  std::vector<std::uint8_t> present_;
  std::vector<double> joints_;  // 7 doubles per cell
};

/// Evaluates every cell with ik_parameterized on the adjusted pose.
FeasibilityGrid build_grid(const Model& model, const PathSpec& path, const RedundancyGrid& q7_grid,
                           const AdjustmentGrid& adjust_grid, const Limits& limits,
                           const IkOptions& ik = {});

/// Atlas CSV: i,j,k,feasible,q1..q7 (joint fields empty when infeasible).
void export_atlas(std::ostream& os, const FeasibilityGrid& grid);
/// Inverse of export_atlas; the grids supply the q7/adjustment axes.
FeasibilityGrid import_atlas(std::istream& is, const RedundancyGrid& q7_grid, const AdjustmentGrid& adjust_grid);

/// Cells that break the construction invariants (FK mismatch, q7 drift,
/// limit or singularity violations); empty for a grid built by build_grid.
struct CellFault {
  int i, j, k;
};
std::vector<CellFault> audit_grid(const FeasibilityGrid& grid, const Model& model, const PathSpec& path,
                                  const Limits& limits, const IkOptions& ik = {});

}  // namespace adjplan
