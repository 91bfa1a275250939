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

#include "adjplan/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "adjplan/csv.hpp"
#include "json.hpp"

namespace adjplan {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path artifact(const ScenarioConfig& cfg, const char* name) { return fs::path(cfg.out_dir) / name; }

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ArtifactMismatch("missing artifact " + p.string());
  return is;
}

struct Planned {
  PathSpec path;
  FeasibilityGrid grid;
  StepConstraint sc;
};

Planned build(const ScenarioConfig& cfg) {
  const Model model = Model::franka();
  const Limits limits = Limits::franka();
  PathSpec path = make_path(cfg);
  RedundancyGrid q7(limits.q_min[6], limits.q_max[6], cfg.m);
  AdjustmentGrid adjust(cfg.y_max, cfg.o);
  FeasibilityGrid grid = build_grid(model, path, q7, adjust, limits, make_ik_options(cfg));
  StepConstraint sc = make_constraint(cfg, limits, path.sample_interval);
  return {std::move(path), std::move(grid), sc};
}

// Loads the persisted table and atlas and checks them against the config.
struct Loaded {
  PathSpec path;
  FeasibilityGrid grid;
  DPTable table;
};

Loaded load_plan(const ScenarioConfig& cfg) {
  const Limits limits = Limits::franka();
  std::ifstream tin = open_in(artifact(cfg, kTableFile));
  DPTable table = load_table_json(tin);
  if (table.provenance != cfg.plan_hash())
    throw ArtifactMismatch("DP table was planned for a different configuration (hash " + table.provenance +
                           ", expected " + cfg.plan_hash() + ")");
  std::ifstream ain = open_in(artifact(cfg, kAtlasFile));
  FeasibilityGrid grid = import_atlas(ain, RedundancyGrid(limits.q_min[6], limits.q_max[6], cfg.m),
                                      AdjustmentGrid(cfg.y_max, cfg.o));
  PathSpec path = make_path(cfg);
  if (grid.num_points() != path.n() + 1 || table.num_points() != grid.num_points() || table.m() != grid.m() ||
      table.o() != grid.o())
    throw ArtifactMismatch("atlas, table and path dimensions disagree");
  return {std::move(path), std::move(grid), std::move(table)};
}

json joints_json(const JointVec& v) { return std::vector<double>(v.data(), v.data() + kNumJoints); }

void write_json(const fs::path& p, const json& doc) {
  auto os = open_out(p);
  os << doc.dump(2) << '\n';
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const InfeasiblePathError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SignalError& e) {
    log << "error: " << e.what() << '\n';
    return kExitSignal;
  } catch (const ArtifactMismatch& e) {
    log << "error: " << e.what() << '\n';
    return kExitArtifact;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int run_grid(const ScenarioConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    fs::create_directories(cfg.out_dir);
    auto start = Clock::now();
    Planned p = build(cfg);
    {
      auto os = open_out(artifact(cfg, kPathFile));
      write_path_csv(os, p.path);
    }
    {
      auto os = open_out(artifact(cfg, kAtlasFile));
      export_atlas(os, p.grid);
    }
    log << "grid: " << p.grid.num_points() << " x " << p.grid.m() << " x " << (2 * p.grid.o() + 1) << ", "
        << p.grid.count_present() << " feasible cells, " << seconds_since(start) << " s\n";
    return kExitOk;
  });
}

int run_plan(const ScenarioConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    fs::create_directories(cfg.out_dir);
    auto start = Clock::now();
    Planned p = build(cfg);
    const double grid_time = seconds_since(start);
    start = Clock::now();
    DPTable table = compute_dp(p.grid, p.sc);
    const double dp_time = seconds_since(start);
    table.provenance = cfg.plan_hash();
    {
      auto os = open_out(artifact(cfg, kPathFile));
      write_path_csv(os, p.path);
    }
    {
      auto os = open_out(artifact(cfg, kAtlasFile));
      export_atlas(os, p.grid);
    }
    {
      auto os = open_out(artifact(cfg, kTableFile));
      save_table_json(os, table);
    }
    json summary;
    summary["provenance"] = table.provenance;
    summary["num_points"] = p.grid.num_points();
    summary["m"] = p.grid.m();
    summary["o"] = p.grid.o();
    summary["feasible_cells"] = p.grid.count_present();
    summary["feasible_start"] = table.has_feasible_start();
    summary["d_max"] = table.d_max;
    summary["j0"] = table.j0;
    if (table.has_feasible_start()) {
      AdjustStep step = max_adjust_step(table, p.grid.adjust_grid());
      summary["delta_m"] = step.delta;
      summary["q0"] = joints_json(p.grid.at(0, table.j0, 0));
    }
    write_json(artifact(cfg, kPlanSummaryFile), summary);

    log << "grid " << grid_time << " s, dp " << dp_time << " s\n";
    if (!table.has_feasible_start()) throw InfeasiblePathError();
    AdjustStep step = max_adjust_step(table, p.grid.adjust_grid());
    log << "d_max = " << step.d_max << ", delta = " << step.delta << " m, j0 = " << step.j0
        << " (q7 = " << p.grid.q7_grid().value(step.j0) << ")\n";
    return kExitOk;
  });
}

int run_simulate(const ScenarioConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const Model model = Model::franka();
    const Limits limits = Limits::franka();
    Loaded plan = load_plan(cfg);
    std::vector<int> signal = adjustment_signal(cfg.signal, plan.table.d_max, plan.table.o(), plan.path.n());
    TrajectoryLog traj = simulate(plan.path, plan.grid, plan.table, signal, limits);
    AuditReport audit = validate_trajectory(traj, limits, model, plan.path, plan.grid.adjust_grid(),
                                            plan.path.n() + 1);
    {
      auto os = open_out(artifact(cfg, kSignalFile));
      os << "i,c\n";
      for (size_t i = 0; i < signal.size(); ++i) os << i << ',' << signal[i] << '\n';
    }
    {
      auto os = open_out(artifact(cfg, kTrajectoryFile));
      write_trajectory_csv(os, traj);
    }
    {
      auto os = open_out(artifact(cfg, kSamplesFile));
      write_samples_csv(os, traj);
    }
    {
      auto os = open_out(artifact(cfg, kAuditFile));
      write_audit_csv(os, audit);
    }
    const CycleRecord& last = traj.cycles.back();
    json summary;
    summary["provenance"] = plan.table.provenance;
    summary["completed"] = audit.completed;
    summary["violations"] = audit.violations;
    summary["max_normalized"] = {{"angle", joints_json(audit.max_angle)},
                                 {"velocity", joints_json(audit.max_vel)},
                                 {"acceleration", joints_json(audit.max_acc)},
                                 {"jerk", joints_json(audit.max_jerk)}};
    summary["max_position_error_m"] = *std::max_element(audit.position_error.begin(), audit.position_error.end());
    summary["final_velocity"] = joints_json(last.qd);
    summary["final_acceleration"] = joints_json(last.qdd);
    summary["max_clamps_per_cycle"] = traj.max_clamps;
    write_json(artifact(cfg, kRunSummaryFile), summary);

    log << "simulated " << traj.cycles.size() - 1 << " cycles, violations " << audit.violations
        << ", max position error " << summary["max_position_error_m"].get<double>() << " m\n";
    for (const auto& note : audit.violation_notes) log << "  " << note << '\n';
    return audit.violations == 0 && audit.completed ? kExitOk : kExitFailure;
  });
}

int run_baseline(const ScenarioConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const Model model = Model::franka();
    const Limits limits = Limits::franka();
    Loaded plan = load_plan(cfg);
    if (!plan.table.has_feasible_start()) throw InfeasiblePathError();
    const JointVec q0 = plan.grid.at(0, plan.table.j0, 0);

    BaselineOptions opts;
    opts.q7_grid = plan.grid.q7_grid();
    opts.ik = make_ik_options(cfg);
    BaselineReport base = baseline_online(model, plan.path, q0, limits, opts);
    std::vector<int> zero(plan.path.n() + 1, 0);
    TrajectoryLog planned = simulate(plan.path, plan.grid, plan.table, zero, limits);

    {
      auto os = open_out(artifact(cfg, kBaselineTrajectoryFile));
      write_trajectory_csv(os, base.log);
    }
    {
      // Per sampling point: planned q7 and, while it runs, the baseline's.
      auto os = open_out(artifact(cfg, kComparisonFile));
      os << "i,planned_q7,baseline_q7\n";
      const long cps = planned.cycles_per_sample;
      for (int i = 0; i <= plan.path.n(); ++i) {
        os << i << ',' << csv::num(planned.cycles[i * cps].q[6]) << ',';
        if (static_cast<size_t>(i * cps) < base.log.cycles.size()) os << csv::num(base.log.cycles[i * cps].q[6]);
        os << '\n';
      }
    }
    json summary;
    summary["completed"] = base.completed;
    summary["halt_index"] = base.halt_index;
    summary["limiting_joint"] = base.limiting_joint >= 0 ? base.limiting_joint + 1 : -1;
    summary["reason"] = base.reason;
    summary["final_joints"] = joints_json(base.log.cycles.back().q);
    write_json(artifact(cfg, kBaselineSummaryFile), summary);
    log << "baseline: " << base.reason << '\n';
    return kExitOk;
  });
}

int run_verify(const ScenarioConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const Model model = Model::franka();
    const Limits limits = Limits::franka();
    Loaded plan = load_plan(cfg);
    StepConstraint sc = make_constraint(cfg, limits, plan.path.sample_interval);
    int problems = 0;
    for (const CellFault& f : audit_grid(plan.grid, model, plan.path, limits, make_ik_options(cfg))) {
      if (problems++ < 20) log << "atlas cell (" << f.i << ", " << f.j << ", " << f.k << ") is not a valid solution\n";
    }
    for (const TableViolation& v : verify_table(plan.table, plan.grid, sc)) {
      if (problems++ < 40) log << "table cell (" << v.i << ", " << v.j << ", " << v.k << "): " << v.what << '\n';
    }
    fs::path traj_file = artifact(cfg, kTrajectoryFile);
    if (fs::exists(traj_file)) {
      std::ifstream in(traj_file, std::ios::binary);
      TrajectoryLog traj = read_trajectory_csv(in, plan.path.comm_period, plan.path.cycles_per_sample);
      AuditReport audit = validate_trajectory(traj, limits, model, plan.path, plan.grid.adjust_grid(),
                                              plan.path.n() + 1);
      problems += audit.violations;
      for (const auto& note : audit.violation_notes) log << "trajectory " << note << '\n';
      if (!audit.completed) {
        ++problems;
        log << "trajectory does not reach the final sampling point\n";
      }
    }
    log << (problems == 0 ? "verify: ok\n" : "verify: " + std::to_string(problems) + " problem(s)\n");
    return problems == 0 ? kExitOk : kExitArtifact;
  });
}

}  // namespace adjplan
