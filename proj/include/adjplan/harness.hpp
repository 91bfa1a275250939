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

// Scenario plumbing: configuration, adjustment signals, the simulated
// 1 kHz run, the greedy online baseline, trajectory audit and file exports.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adjplan/compensator.hpp"
#include "adjplan/feasibility.hpp"
#include "adjplan/planner.hpp"

namespace adjplan {

struct SignalSpec {
  enum class Kind { kZero, kScripted, kRandomWalk };
  Kind kind = Kind::kZero;
  std::vector<int> script;   // c_0..c_n for kScripted
  std::string script_csv;    // alternative source: CSV with a `c` column
  std::uint64_t seed = 0;
  int step_bound = 1 << 20;  // further cap on |c_i - c_{i-1}|
};

struct ScenarioConfig {
  static constexpr int kSchema = 1;

  // Path source: "circle", "task" or "csv".
  std::string path = "circle";
  int n = 100;
  double duration = 10.0;
  std::string path_csv;

  int m = 61;
  int o = 10;
  double y_max = 0.05;
  double t0 = 0.001;

  double plan_fraction = 0.5;
  std::optional<JointVec> margins;  // default: qd_max^2 / (2 qdd_max)
  double singular_tol = 1e-4;

  SignalSpec signal;
  std::string out_dir = "out";

  /// FNV-1a 64 over the canonical planning inputs (path, grids, timing,
  /// limits); signal and output directory do not take part.
  std::string plan_hash() const;
};

ScenarioConfig parse_config(std::istream& is);
void write_config(std::ostream& os, const ScenarioConfig& cfg);

class SignalError : public std::runtime_error {
 public:
  SignalError(int index, const std::string& what)
      : std::runtime_error("adjustment signal rejected at index " + std::to_string(index) + ": " + what),
        index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class ArtifactMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PathSpec make_path(const ScenarioConfig& cfg);
StepConstraint make_constraint(const ScenarioConfig& cfg, const Limits& limits, double sample_interval);
IkOptions make_ik_options(const ScenarioConfig& cfg);

/// Adjustment index sequence c_0..c_n with c_0 = 0, |c_i| <= o and steps
/// bounded by min(d_max, spec.step_bound). Random walks draw steps uniformly
/// from {-s..s} and reflect at +-o; scripted sequences are validated.
std::vector<int> adjustment_signal(const SignalSpec& spec, int d_max, int o, int n);

struct CycleRecord {
  long cycle = 0;
  double t = 0;
  int i = 0;  // sampling point being approached (0 for the initial rest row)
  int c = 0;  // its adjustment index
  JointVec q, qd, qdd, qddd;
  std::uint8_t clamped = 0;
};

struct SampleRecord {
  int i = 0;
  int j = 0;
  int c = 0;
  JointVec q_plan;
};

struct TrajectoryLog {
  double t0 = 0.001;
  int cycles_per_sample = 1;
  std::vector<CycleRecord> cycles;   // cycle 0 is the initial rest state
  std::vector<SampleRecord> samples;
  int max_clamps = 0;
};

/// Runs the planned path under the adjustment stream at the communication
/// rate with motion compensation, from rest at the start cell to rest at the
/// final sample.
TrajectoryLog simulate(const PathSpec& path, const FeasibilityGrid& grid, const DPTable& table,
                       const std::vector<int>& signal, const Limits& limits);

struct BaselineOptions {
  RedundancyGrid q7_grid{-2.8973, 2.8973, 61};
  IkOptions ik;
};

struct BaselineReport {
  TrajectoryLog log;
  bool completed = false;
  int halt_index = -1;      // first sampling point that could not be resolved
  int limiting_joint = -1;  // zero-based; -1 when completed or undetermined
  std::string reason;
};

/// Online resolver without lookahead: at each sampling point it takes the
/// admissible IK solution (any branch, any q7 grid value) nearest to the
/// current joints, executes it through the compensator, and halts when no
/// solution respects the angle limits and the one-sample velocity bound.
BaselineReport baseline_online(const Model& model, const PathSpec& path, const JointVec& q0, const Limits& limits,
                               const BaselineOptions& opts = {});

struct AuditReport {
  JointVec max_angle = JointVec::Zero();  // normalized to [-1, 1] over the limit range
  JointVec max_vel = JointVec::Zero();
  JointVec max_acc = JointVec::Zero();
  JointVec max_jerk = JointVec::Zero();
  int violations = 0;
  std::vector<std::string> violation_notes;
  std::vector<int> sample_c;
  std::vector<double> position_error;  // per sampling point, metres
  bool completed = false;
};

/// Recomputes derivatives from the commanded positions, normalizes by the
/// joint limits and measures the Cartesian error at every sampling point
/// against the adjusted path.
AuditReport validate_trajectory(const TrajectoryLog& log, const Limits& limits, const Model& model,
                                const PathSpec& path, const AdjustmentGrid& adjust_grid, int expected_samples);

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);
TrajectoryLog read_trajectory_csv(std::istream& is, double t0, int cycles_per_sample);
void write_audit_csv(std::ostream& os, const AuditReport& report);
void write_samples_csv(std::ostream& os, const TrajectoryLog& log);

}  // namespace adjplan
