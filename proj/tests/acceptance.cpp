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


// Acceptance run: one PASS/FAIL line per criterion, with the measured
// quantities. Exit status is 0 once every criterion has been evaluated;
// --strict turns the number of failures into the exit status.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adjplan/pipeline.hpp"

namespace {

using namespace adjplan;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const Model kModel = Model::franka();
const Limits kLimits = Limits::franka();

struct Outcome {
  bool pass;
  std::string detail;
};

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

JointVec random_canonical(std::mt19937_64& rng) {
  Limits box = kLimits;
  box.q_min[1] = 0;
  box.q_max[3] = elbow_split(kModel);
  box.q_min[4] = -std::numbers::pi / 2;
  box.q_max[4] = std::numbers::pi / 2;
  JointVec q;
  for (int c = 0; c < kNumJoints; ++c)
    q[c] = std::uniform_real_distribution<double>(box.q_min[c] + 0.05, box.q_max[c] - 0.05)(rng);
  return q;
}

Outcome ik_round_trip() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  const IkOptions opts;
  int tried = 0, ok = 0;
  double worst = 0;
  while (tried < 1000) {
    const JointVec q = random_canonical(rng);
    if (smallest_singular_value(jacobian(kModel, q)) < 2 * opts.singular_tol) continue;
    ++tried;
    auto got = ik_parameterized(kModel, forward_kinematics(kModel, q), q[6], kLimits, opts);
    if (!got) continue;
    const double err = (*got - q).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    ok += err <= 1e-6;
  }
  const double secs = since(start);
  return {ok == tried && secs < 10, std::to_string(ok) + "/" + std::to_string(tried) + " recovered, worst " +
                                        fmt("%.2e", worst) + " rad, " + fmt("%.2f", secs) + " s"};
}

Outcome jacobian_check() {
  std::mt19937_64 rng(102);
  double worst = 0;
  const double h = 1e-6;
  for (int s = 0; s < 100; ++s) {
    JointVec q;
    for (int c = 0; c < kNumJoints; ++c)
      q[c] = std::uniform_real_distribution<double>(kLimits.q_min[c], kLimits.q_max[c])(rng);
    const auto J = jacobian(kModel, q);
    for (int c = 0; c < kNumJoints; ++c) {
      JointVec qp = q, qm = q;
      qp[c] += h;
      qm[c] -= h;
      const PoseD Tp = forward_kinematics(kModel, qp), Tm = forward_kinematics(kModel, qm);
      Eigen::AngleAxisd aa(Tp.R * Tm.R.transpose());
      Eigen::Matrix<double, 6, 1> fd;
      fd << (Tp.p - Tm.p) / (2 * h), aa.angle() * aa.axis() / (2 * h);
      worst = std::max(worst, (J.col(c) - fd).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-6, "max deviation " + fmt("%.2e", worst)};
}

Outcome dp_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> dn(1, 5), dm(2, 4), d_o(1, 2);
  std::bernoulli_distribution present(0.8);
  std::uniform_real_distribution<double> u(-1, 1);
  StepConstraint sc;
  sc.sample_interval = 0.1;
  sc.qd_plan.setConstant(5.0);
  sc.q_lo.setConstant(-0.9);
  sc.q_hi.setConstant(0.9);
  int equal = 0;
  for (int s = 0; s < 50; ++s) {
    const int n = dn(rng), m = dm(rng), o = d_o(rng);
    FeasibilityGrid grid(n + 1, RedundancyGrid(-1, 1, m), AdjustmentGrid(0.05, o));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = -o; k <= o; ++k)
          if (present(rng)) {
            JointVec q = JointVec::Zero();
            q[0] = u(rng);
            q[1] = 0.5 * u(rng);
            grid.set(i, j, k, q);
          }
    equal += flatten_L(compute_dp(grid, sc)) == brute_force_L(grid, sc);
  }
  const double secs = since(start);
  return {equal == 50 && secs < 60, std::to_string(equal) + "/50 identical, " + fmt("%.2f", secs) + " s"};
}

struct Circle {
  ScenarioConfig cfg;
  PathSpec path;
  FeasibilityGrid grid;
  DPTable table;
};

Circle plan_circle(const ScenarioConfig& cfg) {
  PathSpec path = make_path(cfg);
  FeasibilityGrid grid = build_grid(kModel, path, RedundancyGrid::for_limits(kLimits, cfg.m),
                                    AdjustmentGrid(cfg.y_max, cfg.o), kLimits, make_ik_options(cfg));
  DPTable table = compute_dp(grid, make_constraint(cfg, kLimits, path.sample_interval));
  return {cfg, std::move(path), std::move(grid), std::move(table)};
}

AuditReport audit(const Circle& c, const TrajectoryLog& log) {
  return validate_trajectory(log, kLimits, kModel, c.path, c.grid.adjust_grid(), c.path.n() + 1);
}

Outcome safety(const Circle& c) {
  if (!c.table.has_feasible_start()) return {false, "no feasible start"};
  const auto start = Clock::now();
  SignalSpec spec;
  spec.kind = SignalSpec::Kind::kRandomWalk;
  int violations = 0, incomplete = 0, moving = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    spec.seed = seed;
    const auto signal = adjustment_signal(spec, c.table.d_max, c.cfg.o, c.path.n());
    moving += std::any_of(signal.begin(), signal.end(), [](int v) { return v != 0; });
    const AuditReport rep = audit(c, simulate(c.path, c.grid, c.table, signal, kLimits));
    violations += rep.violations;
    incomplete += !rep.completed;
  }
  const double secs = since(start);
  return {violations == 0 && incomplete == 0 && secs < 300,
          "1000 walks with d_max = " + std::to_string(c.table.d_max) + " (" + std::to_string(moving) +
              " non-zero), " + std::to_string(violations) + " violations, " + std::to_string(incomplete) +
              " incomplete, " + fmt("%.1f", secs) + " s"};
}

Outcome circle_completion(const Circle& c, const TrajectoryLog& log) {
  const AuditReport rep = audit(c, log);
  const double mid = (kLimits.q_min[6] + kLimits.q_max[6]) / 2;
  const double first = log.samples.front().q_plan[6], last = log.samples.back().q_plan[6];
  const bool samples = static_cast<int>(log.samples.size()) == c.path.n() + 1;
  return {rep.completed && samples && first > mid && last < mid && last < first,
          std::to_string(log.samples.size()) + " points, q7 " + fmt("%.3f", first) + " -> " + fmt("%.3f", last)};
}

Outcome baseline_failure(const Circle& c) {
  BaselineOptions opts;
  opts.q7_grid = c.grid.q7_grid();
  opts.ik = make_ik_options(c.cfg);
  const BaselineReport rep = baseline_online(kModel, c.path, c.grid.at(0, c.table.j0, 0), kLimits, opts);
  const double q7_end = rep.log.cycles.back().q[6];
  const bool pass = !rep.completed && rep.halt_index < c.path.n() && rep.limiting_joint == 6;
  return {pass, rep.reason + ", final q7 " + fmt("%.4f", q7_end)};
}

Outcome tracking_error() {
  ScenarioConfig cfg;
  cfg.path = "task";
  cfg.signal.kind = SignalSpec::Kind::kRandomWalk;
  cfg.signal.seed = 7;
  const Circle c = plan_circle(cfg);
  if (!c.table.has_feasible_start()) return {false, "task path has no feasible start"};
  const auto signal = adjustment_signal(cfg.signal, c.table.d_max, cfg.o, c.path.n());
  const AuditReport rep = audit(c, simulate(c.path, c.grid, c.table, signal, kLimits));
  std::vector<double> inner(rep.position_error.begin() + 5, rep.position_error.end() - 5);
  const double worst = *std::max_element(inner.begin(), inner.end());
  std::nth_element(inner.begin(), inner.begin() + inner.size() / 2, inner.end());
  const double median = inner[inner.size() / 2];
  return {worst <= 5e-3 && median <= 1e-3, "max " + fmt("%.2e", worst) + " m, median " + fmt("%.2e", median) + " m"};
}

Outcome error_bound_check() {
  const double t0 = 0.001;
  double worst_err = -1e9, worst_time = -1e9;
  for (double f : {0.25, 0.5, 0.75}) {
    const JointVec plan = f * kLimits.qd_max;
    const ErrorBounds eb = error_bounds(kLimits.qd_max, plan, kLimits.qdd_max);
    ManipulatorState s;
    s.qd = kLimits.qd_max;
    JointVec peak = JointVec::Zero(), recovered = JointVec::Constant(-1);
    for (long k = 0; k < 5000; ++k) {
      const long next_sample = (k / 100 + 1) * 100;
      const ControlClock clock{t0, (next_sample - k) * t0, 1000000};
      s = advance(s, compensate_step(s, -plan * (next_sample * t0), clock, kLimits, derived_limits(kLimits, clock)).q,
                  t0);
      const JointVec err = s.q + plan * ((k + 1) * t0);
      peak = peak.cwiseMax(err.cwiseAbs());
      for (int c = 0; c < kNumJoints; ++c)
        if (recovered[c] < 0 && err[c] <= 0) recovered[c] = (k + 1) * t0;
    }
    for (int c = 0; c < kNumJoints; ++c) {
      worst_err = std::max(worst_err, peak[c] - eb.err_max[c]);
      worst_time = std::max(worst_time, (recovered[c] < 0 ? 1e9 : recovered[c]) - eb.t_max[c]);
    }
  }
  // 1e-9 rad absorbs rounding where the peak meets the bound exactly.
  return {worst_err <= 1e-9 && worst_time <= 0, "peak error minus bound " + fmt("%.2e", worst_err) +
                                                     " rad, recovery minus bound " + fmt("%.3f", worst_time) + " s"};
}

Outcome terminal_stop(const TrajectoryLog& log) {
  const CycleRecord& last = log.cycles.back();
  bool ok = true;
  for (int c = 0; c < kNumJoints; ++c) {
    ok = ok && std::abs(last.qd[c]) <= kLimits.qdd_max[c] * log.t0;
    ok = ok && std::abs(last.qdd[c]) <= kLimits.qddd_max[c] * log.t0;
  }
  return {ok, "final max |qd| " + fmt("%.2e", last.qd.cwiseAbs().maxCoeff()) + ", max |qdd| " +
                  fmt("%.2e", last.qdd.cwiseAbs().maxCoeff()) + " after " +
                  std::to_string(log.cycles.size() - 1 - static_cast<size_t>(log.samples.back().i) *
                                                             log.cycles_per_sample) +
                  " stop cycles"};
}

double dp_seconds(const ScenarioConfig& cfg) {
  const PathSpec path = make_path(cfg);
  const FeasibilityGrid grid = build_grid(kModel, path, RedundancyGrid::for_limits(kLimits, cfg.m),
                                          AdjustmentGrid(cfg.y_max, cfg.o), kLimits, make_ik_options(cfg));
  const StepConstraint sc = make_constraint(cfg, kLimits, path.sample_interval);
  double best = 1e9;
  for (int r = 0; r < 5; ++r) {
    const auto start = Clock::now();
    const DPTable table = compute_dp(grid, sc);
    best = std::min(best, since(start));
  }
  return best;
}

Outcome complexity() {
  ScenarioConfig cfg;
  std::vector<double> by_o, by_n;
  for (int o : {5, 10, 20}) {
    cfg.o = o;
    by_o.push_back(dp_seconds(cfg));
  }
  cfg.o = 10;
  // Only n changes: the sample interval stays at 0.1 s, so the path
  // duration grows with n.
  for (int n : {50, 100, 200}) {
    cfg.n = n;
    cfg.duration = 0.1 * n;
    by_n.push_back(dp_seconds(cfg));
  }
  const double o1 = by_o[1] / by_o[0], o2 = by_o[2] / by_o[1], n1 = by_n[1] / by_n[0], n2 = by_n[2] / by_n[1];
  auto in = [](double r, double lo, double hi) { return r >= lo && r <= hi; };
  return {in(o1, 2, 6) && in(o2, 2, 6) && in(n1, 1.5, 3) && in(n2, 1.5, 3),
          "o 5->10 " + fmt("%.2f", o1) + "x, 10->20 " + fmt("%.2f", o2) + "x; n 50->100 " + fmt("%.2f", n1) +
              "x, 100->200 " + fmt("%.2f", n2) + "x"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& root) {
  ScenarioConfig cfg;
  cfg.signal.kind = SignalSpec::Kind::kRandomWalk;
  cfg.signal.seed = 11;
  const fs::path a = root / "run_a", b = root / "run_b";
  for (const fs::path& dir : {a, b}) {
    fs::remove_all(dir);
    cfg.out_dir = dir.string();
    std::ostringstream log;
    run_plan(cfg, log);
    run_simulate(cfg, log);
    run_baseline(cfg, log);
  }
  int files = 0, same = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    same += slurp(entry.path()) == slurp(b / entry.path().filename());
  }
  return {files >= 10 && same == files, std::to_string(same) + "/" + std::to_string(files) + " artifacts identical"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out = "acceptance_runs";
  bool strict = false;
  app.add_option("--out", out, "Scratch directory for pipeline artifacts");
  app.add_flag("--strict", strict, "Exit with the number of failed criteria");
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << r.detail << std::endl;
  };

  const Circle circle = plan_circle(ScenarioConfig{});
  const TrajectoryLog zero_run = circle.table.has_feasible_start()
                                     ? simulate(circle.path, circle.grid, circle.table,
                                                std::vector<int>(circle.path.n() + 1, 0), kLimits)
                                     : TrajectoryLog{};

  report(1, "IK round trip", ik_round_trip);
  report(2, "Jacobian vs finite differences", jacobian_check);
  report(3, "DP equals brute force", dp_oracle);
  report(4, "safety under random adjustment walks", [&] { return safety(circle); });
  report(5, "circle completion and q7 traversal", [&] { return circle_completion(circle, zero_run); });
  report(6, "online baseline halts on joint 7", [&] { return baseline_failure(circle); });
  report(7, "task path tracking error", tracking_error);
  report(8, "opposing-velocity error and recovery bounds", error_bound_check);
  report(9, "terminal stop", [&] { return terminal_stop(zero_run); });
  report(10, "DP complexity scaling", complexity);
  report(11, "pipeline determinism", [&] { return determinism(out); });
  std::cout << (11 - failures) << "/11 criteria passed" << std::endl;
  return strict ? failures : 0;
}
