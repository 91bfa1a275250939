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

// Offline planning over the feasibility grid.
//
// L(i, j, k) is the largest per-sample adjustment step d such that, starting
// from grid cell (i, j, k), every adjustment sequence with |c_x - c_{x-1}| <= d
// and |c_x| <= o can be followed to the end of the path by a causal choice of
// q7 branches that respects the reduced angle bounds and the planning
// velocity bound. The backward recursion is
//
//   L(i,j,k) >= d  <=>  for every e with |e| <= d, |k+e| <= o there is a j'
//                       with (i+1, j', k+e) reachable in one step from
//                       (i, j, k) and L(i+1, j', k+e) >= d.
//
// Values are capped at the step size beyond which the set of admissible
// sequences stops growing: o + |k| for the last step, 2o otherwise. A capped
// ("saturated") value stands for an unbounded envelope when it is compared
// against a predecessor's d.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "adjplan/feasibility.hpp"

namespace adjplan {

/// Per-sample motion budget used while planning.
struct StepConstraint {
  double sample_interval = 0.1;
  JointVec qd_plan = JointVec::Zero();
  JointVec q_lo = JointVec::Zero();  // reduced angle bounds
  JointVec q_hi = JointVec::Zero();

  /// qd_plan = fraction * qd_max; angle bounds shrunk by the per-joint
  /// stopping distance qd_max^2 / (2 qdd_max).
  static StepConstraint with_defaults(const Limits& limits, double sample_interval, double plan_fraction = 0.5);
  static StepConstraint with_margins(const Limits& limits, double sample_interval, const JointVec& qd_plan,
                                     const JointVec& margin);

  /// Throws unless qd_plan <= qd_max and the reduced bounds are non-empty.
  void validate(const Limits& limits) const;

  bool usable(const JointVec& q) const {
    return (q.array() >= q_lo.array()).all() && (q.array() <= q_hi.array()).all();
  }
  bool step_ok(const JointVec& from, const JointVec& to) const {
    return ((to - from).cwiseAbs().array() <= qd_plan.array() * sample_interval).all();
  }
};

class InfeasiblePathError : public std::runtime_error {
 public:
  InfeasiblePathError() : std::runtime_error("no feasible start") {}
};

class AdjustmentStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value table and successor pointers produced by compute_dp.
class DPTable {
 public:
  static constexpr int kAbsent = -2;  // cell infeasible or outside reduced bounds
  static constexpr int kStuck = -1;   // cell usable but without any continuation
  static constexpr int kNone = -1;    // no successor stored
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  DPTable(int num_points, int m, int o);

  int num_points() const { return num_points_; }
  int n() const { return num_points_ - 1; }
  int m() const { return m_; }
  int o() const { return o_; }

  int L(int i, int j, int k) const { return values_[cell(i, j, k)]; }
  void set_L(int i, int j, int k, int value) { values_[cell(i, j, k)] = value; }

  /// Branch index of the successor at (i+1, ., k_next), or kNone.
  int successor(int i, int j, int k, int k_next) const;
  void set_successor(int i, int j, int k, int k_next, int j_next);

  /// Largest meaningful envelope at (i, k): o + |k| before the final sample,
  /// 2o earlier.
  int saturation(int i, int k) const;
  /// L with saturated values (and the final stage) mapped to kUnbounded.
  int effective_L(int i, int j, int k) const;

  int d_max = kStuck;
  int j0 = -1;
  StepConstraint constraint;
  std::string provenance;

  bool has_feasible_start() const { return d_max >= 0; }
  bool operator==(const DPTable& other) const;

 private:
  size_t cell(int i, int j, int k) const;

  int num_points_;
  int m_;
  int o_;
  std::vector<int> values_;
  std::vector<std::int16_t> successors_;  // 2o+1 per cell, indexed by k_next
};

/// Backward dynamic program; never throws on infeasible data (check
/// has_feasible_start()).
DPTable compute_dp(const FeasibilityGrid& grid, const StepConstraint& sc);

struct AdjustStep {
  int d_max;
  int j0;
  double delta;  // metres
};
/// Maximum admissible step, its starting branch and its metric size.
/// Throws InfeasiblePathError when no start cell admits a continuation.
AdjustStep max_adjust_step(const DPTable& table, const AdjustmentGrid& adjust_grid);

struct NextJoints {
  int j_next;
  JointVec q;
};
/// Constant-time successor lookup for the adjustment change k -> k_next.
NextJoints next_joints(const DPTable& table, const FeasibilityGrid& grid, int i, int j, int k, int k_next);

/// Reference L values by exhaustive game search over all adjustment
/// sequences (no shared subproblems). Small instances only.
std::vector<int> brute_force_L(const FeasibilityGrid& grid, const StepConstraint& sc);
/// L values of a table in the same (i, j, k) order as brute_force_L.
std::vector<int> flatten_L(const DPTable& table);

struct TableViolation {
  int i, j, k;
  std::string what;
};
/// Checks every table invariant; returns the violations (empty when sound).
std::vector<TableViolation> verify_table(const DPTable& table, const FeasibilityGrid& grid,
                                         const StepConstraint& sc);

void save_table_json(std::ostream& os, const DPTable& table);
DPTable load_table_json(std::istream& is);

}  // namespace adjplan
