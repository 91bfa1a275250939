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

// File-level stages behind the command line. Each stage reads and writes
// artifacts in cfg.out_dir and returns a process exit code.

#pragma once

#include <iosfwd>

#include "adjplan/harness.hpp"

namespace adjplan {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // bad input, or an audit that found violations
  kExitInfeasible = 2,
  kExitSignal = 3,
  kExitArtifact = 4,
};

// Artifact names inside the output directory.
inline constexpr const char* kPathFile = "path.csv";
inline constexpr const char* kAtlasFile = "atlas.csv";
inline constexpr const char* kTableFile = "dp_table.json";
inline constexpr const char* kPlanSummaryFile = "plan_summary.json";
inline constexpr const char* kSignalFile = "signal.csv";
inline constexpr const char* kTrajectoryFile = "trajectory.csv";
inline constexpr const char* kSamplesFile = "samples.csv";
inline constexpr const char* kAuditFile = "audit.csv";
inline constexpr const char* kRunSummaryFile = "run_summary.json";
inline constexpr const char* kBaselineTrajectoryFile = "baseline_trajectory.csv";
inline constexpr const char* kBaselineSummaryFile = "baseline_summary.json";
inline constexpr const char* kComparisonFile = "comparison.csv";

/// Builds the feasibility grid and writes path.csv and atlas.csv.
int run_grid(const ScenarioConfig& cfg, std::ostream& log);
/// Grid plus dynamic program; writes dp_table.json and plan_summary.json.
int run_plan(const ScenarioConfig& cfg, std::ostream& log);
/// Replays the plan under the configured adjustment signal; writes the
/// signal, trajectory, sample, audit CSVs and run_summary.json.
int run_simulate(const ScenarioConfig& cfg, std::ostream& log);
/// Greedy online run from the planned start joints plus a per-sample
/// comparison with the planned run.
int run_baseline(const ScenarioConfig& cfg, std::ostream& log);
/// Re-checks persisted artifacts against the configuration.
int run_verify(const ScenarioConfig& cfg, std::ostream& log);

}  // namespace adjplan
