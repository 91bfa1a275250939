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

#include "adjplan/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "adjplan/csv.hpp"
#include "json.hpp"

namespace adjplan {

using json = nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) out[k] = digits[v & 0xf];
  return out;
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<double> as_vector(const JointVec& v) { return std::vector<double>(v.data(), v.data() + kNumJoints); }

JointVec as_joints(const json& j, const char* what) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != kNumJoints) throw std::runtime_error(std::string("config: ") + what + " needs 7 entries");
  return Eigen::Map<const JointVec>(v.data());
}

const char* kind_name(SignalSpec::Kind kind) {
  switch (kind) {
    case SignalSpec::Kind::kZero:
      return "zero";
    case SignalSpec::Kind::kScripted:
      return "scripted";
    case SignalSpec::Kind::kRandomWalk:
      return "random_walk";
  }
  return "zero";
}

}  // namespace

std::string ScenarioConfig::plan_hash() const {
  // Numbers go through the shortest round-trip form so the text is stable.
  std::ostringstream os;
  os << "path=" << path << ";n=" << n << ";duration=" << csv::num(duration) << ";m=" << m << ";o=" << o
     << ";y_max=" << csv::num(y_max) << ";t0=" << csv::num(t0) << ";plan_fraction=" << csv::num(plan_fraction)
     << ";singular_tol=" << csv::num(singular_tol) << ";margins=";
  if (margins)
    for (int c = 0; c < kNumJoints; ++c) os << csv::num((*margins)[c]) << ',';
  else
    os << "default";
  if (path == "csv") os << ";csv=" << slurp(path_csv);
  return hex64(fnv1a(os.str()));
}

ScenarioConfig parse_config(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: malformed JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    if (doc.value("schema", ScenarioConfig::kSchema) != ScenarioConfig::kSchema)
      throw std::runtime_error("config: unsupported schema");
    if (doc.contains("path")) {
      const auto& p = doc["path"];
      cfg.path = p.value("kind", cfg.path);
      cfg.n = p.value("n", cfg.n);
      cfg.duration = p.value("duration", cfg.duration);
      cfg.path_csv = p.value("file", cfg.path_csv);
    }
    if (doc.contains("grid")) {
      const auto& g = doc["grid"];
      cfg.m = g.value("m", cfg.m);
      cfg.o = g.value("o", cfg.o);
      cfg.y_max = g.value("y_max", cfg.y_max);
    }
    if (doc.contains("timing")) cfg.t0 = doc["timing"].value("t0", cfg.t0);
    if (doc.contains("limits")) {
      const auto& l = doc["limits"];
      cfg.plan_fraction = l.value("plan_fraction", cfg.plan_fraction);
      cfg.singular_tol = l.value("singular_tol", cfg.singular_tol);
      if (l.contains("margins")) cfg.margins = as_joints(l["margins"], "margins");
    }
    if (doc.contains("signal")) {
      const auto& s = doc["signal"];
      std::string kind = s.value("kind", "zero");
      if (kind == "zero")
        cfg.signal.kind = SignalSpec::Kind::kZero;
      else if (kind == "scripted")
        cfg.signal.kind = SignalSpec::Kind::kScripted;
      else if (kind == "random_walk")
        cfg.signal.kind = SignalSpec::Kind::kRandomWalk;
      else
        throw std::runtime_error("config: unknown signal kind '" + kind + "'");
      cfg.signal.seed = s.value("seed", cfg.signal.seed);
      cfg.signal.step_bound = s.value("step_bound", cfg.signal.step_bound);
      if (s.contains("values")) cfg.signal.script = s["values"].get<std::vector<int>>();
      cfg.signal.script_csv = s.value("file", cfg.signal.script_csv);
    }
    cfg.out_dir = doc.value("out", cfg.out_dir);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  if (cfg.path != "circle" && cfg.path != "task" && cfg.path != "csv")
    throw std::runtime_error("config: unknown path kind '" + cfg.path + "'");
  if (cfg.path == "csv" && cfg.path_csv.empty()) throw std::runtime_error("config: csv path needs a file");
  if (cfg.signal.step_bound < 0) throw std::runtime_error("config: step bound must be non-negative");
  return cfg;
}

void write_config(std::ostream& os, const ScenarioConfig& cfg) {
  json doc;
  doc["schema"] = ScenarioConfig::kSchema;
  doc["path"] = {{"kind", cfg.path}, {"n", cfg.n}, {"duration", cfg.duration}};
  if (!cfg.path_csv.empty()) doc["path"]["file"] = cfg.path_csv;
  doc["grid"] = {{"m", cfg.m}, {"o", cfg.o}, {"y_max", cfg.y_max}};
  doc["timing"] = {{"t0", cfg.t0}};
  doc["limits"] = {{"plan_fraction", cfg.plan_fraction}, {"singular_tol", cfg.singular_tol}};
  if (cfg.margins) doc["limits"]["margins"] = as_vector(*cfg.margins);
  doc["signal"] = {{"kind", kind_name(cfg.signal.kind)}, {"seed", cfg.signal.seed},
                   {"step_bound", cfg.signal.step_bound}};
  if (!cfg.signal.script.empty()) doc["signal"]["values"] = cfg.signal.script;
  if (!cfg.signal.script_csv.empty()) doc["signal"]["file"] = cfg.signal.script_csv;
  doc["out"] = cfg.out_dir;
  os << doc.dump(2) << '\n';
}

PathSpec make_path(const ScenarioConfig& cfg) {
  if (cfg.path == "circle") return circle_path(cfg.n, cfg.duration, cfg.t0);
  if (cfg.path == "task") return task_path(cfg.t0);
  std::ifstream in(cfg.path_csv);
  if (!in) throw std::runtime_error("cannot open path CSV " + cfg.path_csv);
  return read_path_csv(in, cfg.t0);
}

StepConstraint make_constraint(const ScenarioConfig& cfg, const Limits& limits, double sample_interval) {
  if (cfg.margins)
    return StepConstraint::with_margins(limits, sample_interval, cfg.plan_fraction * limits.qd_max, *cfg.margins);
  return StepConstraint::with_defaults(limits, sample_interval, cfg.plan_fraction);
}

IkOptions make_ik_options(const ScenarioConfig& cfg) {
  IkOptions ik;
  ik.singular_tol = cfg.singular_tol;
  return ik;
}

std::vector<int> adjustment_signal(const SignalSpec& spec, int d_max, int o, int n) {
  if (d_max < 0) throw InfeasiblePathError();
  if (n < 1 || o < 1) throw std::invalid_argument("adjustment signal needs n >= 1 and o >= 1");
  const int s = std::min(d_max, spec.step_bound);
  std::vector<int> c(n + 1, 0);
  switch (spec.kind) {
    case SignalSpec::Kind::kZero:
      break;
    case SignalSpec::Kind::kRandomWalk: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_int_distribution<int> step(-s, s);
      for (int i = 1; i <= n; ++i) {
        int next = c[i - 1] + step(rng);
        if (next > o) next = 2 * o - next;
        if (next < -o) next = -2 * o - next;
        c[i] = next;
      }
      break;
    }
    case SignalSpec::Kind::kScripted: {
      std::vector<int> script = spec.script;
      if (!spec.script_csv.empty()) {
        std::ifstream in(spec.script_csv);
        if (!in) throw std::runtime_error("cannot open signal CSV " + spec.script_csv);
        csv::Reader reader(in, {"i", "c"});
        script.clear();
        while (auto row = reader.next()) script.push_back(static_cast<int>(csv::to_long((*row)[1])));
      }
      if (static_cast<int>(script.size()) != n + 1)
        throw SignalError(static_cast<int>(std::min<size_t>(script.size(), n + 1)),
                          "expected " + std::to_string(n + 1) + " values");
      if (script[0] != 0) throw SignalError(0, "sequence must start at 0");
      for (int i = 0; i <= n; ++i) {
        if (std::abs(script[i]) > o) throw SignalError(i, "|c| exceeds o = " + std::to_string(o));
        if (i > 0 && std::abs(script[i] - script[i - 1]) > s)
          throw SignalError(i, "step " + std::to_string(script[i] - script[i - 1]) + " exceeds " + std::to_string(s));
      }
      c = script;
      break;
    }
  }
  return c;
}

namespace {

// Runs compensated cycles from `state` toward `target` until `seg_end`,
// appending one record per cycle; `cycle` is advanced in place.
void run_segment(TrajectoryLog& log, ManipulatorState& state, long& cycle, const JointVec& target, int target_i,
                 int target_c, long seg_end, const Limits& limits, const JointVec& caution, long total_cycles) {
  for (; cycle < seg_end; ++cycle) {
    ControlClock clock{log.t0, (seg_end - cycle) * log.t0, std::max(0L, total_cycles - cycle)};
    DerivedLimits dl = derived_limits(limits, clock);
    dl.qd_caution = caution;
    Command cmd = compensate_step(state, target, clock, limits, dl);
    ManipulatorState next = advance(state, cmd.q, log.t0);
    CycleRecord rec;
    rec.cycle = cycle + 1;
    rec.t = static_cast<double>(cycle + 1) * log.t0;
    rec.i = target_i;
    rec.c = target_c;
    rec.q = next.q;
    rec.qd = next.qd;
    rec.qdd = next.qdd;
    rec.qddd = (next.qdd - state.qdd) / log.t0;
    rec.clamped = cmd.clamped;
    log.cycles.push_back(rec);
    log.max_clamps = std::max(log.max_clamps, cmd.max_clamps);
    state = next;
  }
}

// Past the final sample the stop shaping is held at one remaining cycle,
// where the velocity ceiling is zero, until the arm is at rest.
void run_stop(TrajectoryLog& log, ManipulatorState& state, long& cycle, const JointVec& target, int target_i,
              int target_c, const Limits& limits, const JointVec& caution) {
  constexpr int kMaxStopCycles = 1000;
  auto at_rest = [&] {
    return (state.qd.cwiseAbs().array() <= 1e-9 * limits.qd_max.array()).all() &&
           (state.qdd.cwiseAbs().array() <= 1e-6 * limits.qdd_max.array()).all();
  };
  for (int k = 0; k < kMaxStopCycles && !at_rest(); ++k) {
    const long end = cycle + 1;
    run_segment(log, state, cycle, target, target_i, target_c, end, limits, caution, end);
  }
}

CycleRecord rest_record(const JointVec& q) {
  CycleRecord rec;
  rec.q = q;
  rec.qd = rec.qdd = rec.qddd = JointVec::Zero();
  return rec;
}

}  // namespace

TrajectoryLog simulate(const PathSpec& path, const FeasibilityGrid& grid, const DPTable& table,
                       const std::vector<int>& signal, const Limits& limits) {
  if (!table.has_feasible_start()) throw InfeasiblePathError();
  const int n = path.n();
  if (grid.n() != n || table.n() != n) throw ArtifactMismatch("path, grid and table disagree on n");
  if (static_cast<int>(signal.size()) != n + 1) throw SignalError(0, "signal length does not match the path");
  if (signal[0] != 0) throw SignalError(0, "sequence must start at 0");

  TrajectoryLog log;
  log.t0 = path.comm_period;
  log.cycles_per_sample = path.cycles_per_sample;
  const long cps = log.cycles_per_sample;
  const long total = n * cps;
  const JointVec caution = cautionary_velocity(limits, log.t0);

  int j = table.j0;
  JointVec q = grid.at(0, j, 0);
  ManipulatorState state = ManipulatorState::at_rest(q);
  log.cycles.push_back(rest_record(q));
  log.samples.push_back({0, j, 0, q});
  long cycle = 0;
  for (int i = 0; i < n; ++i) {
    NextJoints next;
    try {
      next = next_joints(table, grid, i, j, signal[i], signal[i + 1]);
    } catch (const AdjustmentStepError& e) {
      throw SignalError(i + 1, e.what());
    }
    j = next.j_next;
    log.samples.push_back({i + 1, j, signal[i + 1], next.q});
    run_segment(log, state, cycle, next.q, i + 1, signal[i + 1], (i + 1) * cps, limits, caution, total);
  }
  run_stop(log, state, cycle, log.samples.back().q_plan, n, signal[n], limits, caution);
  return log;
}

namespace {

struct Candidate {
  JointVec q;
  int violated = 0;     // joints outside angle limits or the step bound
  double excess = 0;    // summed normalized excess
  int worst_joint = -1;
  double worst = 0;
};

// Nearest 2*pi image of `angle` to `ref`.
double nearest_image(double angle, double ref) {
  constexpr double two_pi = 2 * std::numbers::pi;
  return angle + two_pi * std::round((ref - angle) / two_pi);
}

Candidate classify(const JointVec& raw, const JointVec& q_now, const Limits& limits, double t_s) {
  Candidate cand;
  for (int c = 0; c < kNumJoints; ++c) {
    // Prefer an in-range image; otherwise keep the one nearest the current joint.
    double best = nearest_image(raw[c], q_now[c]);
    double best_excess = std::numeric_limits<double>::infinity();
    for (int shift = -1; shift <= 1; ++shift) {
      double a = best + shift * 2 * std::numbers::pi;
      double range = limits.q_max[c] - limits.q_min[c];
      double ex = std::max({0.0, limits.q_min[c] - a, a - limits.q_max[c]}) / range +
                  std::max(0.0, std::abs(a - q_now[c]) / (limits.qd_max[c] * t_s) - 1);
      if (ex < best_excess) {
        best_excess = ex;
        cand.q[c] = a;
      }
    }
    if (best_excess > 0) {
      ++cand.violated;
      cand.excess += best_excess;
      if (best_excess > cand.worst) {
        cand.worst = best_excess;
        cand.worst_joint = c;
      }
    }
  }
  return cand;
}

}  // namespace

BaselineReport baseline_online(const Model& model, const PathSpec& path, const JointVec& q0, const Limits& limits,
                               const BaselineOptions& opts) {
  path.validate();
  BaselineReport report;
  TrajectoryLog& log = report.log;
  log.t0 = path.comm_period;
  log.cycles_per_sample = path.cycles_per_sample;
  const int n = path.n();
  const long cps = log.cycles_per_sample;
  const long total = n * cps;
  const JointVec caution = cautionary_velocity(limits, log.t0);

  ManipulatorState state = ManipulatorState::at_rest(q0);
  log.cycles.push_back(rest_record(q0));
  log.samples.push_back({0, -1, 0, q0});
  long cycle = 0;
  for (int i = 0; i < n; ++i) {
    const PoseD& target = path.poses[i + 1];
    std::optional<Candidate> chosen, nearest_blocked;
    int chosen_j = -1;
    for (int j = 0; j < opts.q7_grid.m(); ++j) {
      for (const JointVec& raw : ik_candidates(model, target, opts.q7_grid.value(j))) {
        auto [ep, er] = pose_error(forward_kinematics(model, raw), target);
        if (!(ep <= opts.ik.fk_tol && er <= opts.ik.fk_tol)) continue;
        if (is_singular(model, raw, opts.ik.singular_tol)) continue;
        Candidate cand = classify(raw, state.q, limits, path.sample_interval);
        if (cand.violated == 0) {
          double dist = (cand.q - state.q).norm();
          if (!chosen || dist < (chosen->q - state.q).norm()) {
            chosen = cand;
            chosen_j = j;
          }
        } else if (!nearest_blocked || cand.violated < nearest_blocked->violated ||
                   (cand.violated == nearest_blocked->violated && cand.excess < nearest_blocked->excess)) {
          nearest_blocked = cand;
        }
      }
    }
    if (!chosen) {
      report.halt_index = i + 1;
      if (nearest_blocked) report.limiting_joint = nearest_blocked->worst_joint;
      std::ostringstream why;
      why << "no admissible solution for sampling point " << i + 1;
      if (report.limiting_joint >= 0)
        why << "; closest candidate blocked by joint " << report.limiting_joint + 1 << " (q"
            << report.limiting_joint + 1 << " = " << state.q[report.limiting_joint] << " rad)";
      report.reason = why.str();
      return report;
    }
    log.samples.push_back({i + 1, chosen_j, 0, chosen->q});
    run_segment(log, state, cycle, chosen->q, i + 1, 0, (i + 1) * cps, limits, caution, total);
  }
  run_stop(log, state, cycle, log.samples.back().q_plan, n, 0, limits, caution);
  report.completed = true;
  report.reason = "completed";
  return report;
}

AuditReport validate_trajectory(const TrajectoryLog& log, const Limits& limits, const Model& model,
                                const PathSpec& path, const AdjustmentGrid& adjust_grid, int expected_samples) {
  constexpr double kTol = 1e-9;  // normalized slack for floating-point differences
  AuditReport rep;
  if (log.cycles.empty()) return rep;
  const double t0 = log.t0;
  const JointVec mid = (limits.q_max + limits.q_min) / 2;
  const JointVec half = (limits.q_max - limits.q_min) / 2;

  JointVec v_prev = JointVec::Zero(), a_prev = JointVec::Zero();
  for (size_t k = 0; k < log.cycles.size(); ++k) {
    const CycleRecord& rec = log.cycles[k];
    JointVec v = JointVec::Zero(), a = JointVec::Zero(), jerk = JointVec::Zero();
    if (k > 0) {
      v = (rec.q - log.cycles[k - 1].q) / t0;
      a = (v - v_prev) / t0;
      jerk = (a - a_prev) / t0;
    }
    const JointVec n_angle = (rec.q - mid).cwiseQuotient(half).cwiseAbs();
    const JointVec n_vel = v.cwiseQuotient(limits.qd_max).cwiseAbs();
    const JointVec n_acc = a.cwiseQuotient(limits.qdd_max).cwiseAbs();
    const JointVec n_jerk = jerk.cwiseQuotient(limits.qddd_max).cwiseAbs();
    rep.max_angle = rep.max_angle.cwiseMax(n_angle);
    rep.max_vel = rep.max_vel.cwiseMax(n_vel);
    rep.max_acc = rep.max_acc.cwiseMax(n_acc);
    rep.max_jerk = rep.max_jerk.cwiseMax(n_jerk);
    for (int c = 0; c < kNumJoints; ++c) {
      std::string what;
      if (n_angle[c] > 1 + kTol) what += " angle";
      if (n_vel[c] > 1 + kTol) what += " velocity";
      if (n_acc[c] > 1 + kTol) what += " acceleration";
      if (n_jerk[c] > 1 + kTol) what += " jerk";
      // The logged derivatives must be the differences of the commands.
      if (std::abs(rec.qd[c] - v[c]) > 1e-6 * limits.qd_max[c] ||
          std::abs(rec.qdd[c] - a[c]) > 1e-6 * limits.qdd_max[c] ||
          std::abs(rec.qddd[c] - jerk[c]) > 1e-6 * limits.qddd_max[c])
        what += " inconsistent-derivatives";
      if (!what.empty()) {
        ++rep.violations;
        if (rep.violation_notes.size() < 100)
          rep.violation_notes.push_back("cycle " + std::to_string(rec.cycle) + " joint " + std::to_string(c + 1) +
                                        ":" + what);
      }
    }
    v_prev = v;
    a_prev = a;
  }

  const long cps = log.cycles_per_sample;
  for (const CycleRecord& rec : log.cycles) {
    if (rec.cycle % cps != 0) continue;
    const int i = static_cast<int>(rec.cycle / cps);
    if (i > path.n()) break;
    const PoseD desired = adjusted_pose(path.poses[i], adjust_grid.value(rec.c));
    const PoseD actual = forward_kinematics(model, rec.q);
    rep.sample_c.push_back(rec.c);
    rep.position_error.push_back((actual.p - desired.p).norm());
  }
  rep.completed = static_cast<int>(rep.position_error.size()) == expected_samples;
  return rep;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  os << "cycle,t,i,c";
  for (const char* prefix : {"q", "qd", "qdd", "qddd"})
    for (int c = 1; c <= kNumJoints; ++c) os << ',' << prefix << c;
  os << ",clamped_mask\n";
  for (const CycleRecord& r : log.cycles) {
    os << r.cycle << ',' << csv::num(r.t) << ',' << r.i << ',' << r.c;
    for (const JointVec* v : {&r.q, &r.qd, &r.qdd, &r.qddd})
      for (int c = 0; c < kNumJoints; ++c) os << ',' << csv::num((*v)[c]);
    os << ',' << static_cast<int>(r.clamped) << '\n';
  }
}

TrajectoryLog read_trajectory_csv(std::istream& is, double t0, int cycles_per_sample) {
  std::vector<std::string> header{"cycle", "t", "i", "c"};
  for (const char* prefix : {"q", "qd", "qdd", "qddd"})
    for (int c = 1; c <= kNumJoints; ++c) header.push_back(prefix + std::to_string(c));
  header.push_back("clamped_mask");
  csv::Reader reader(is, header);
  TrajectoryLog log;
  log.t0 = t0;
  log.cycles_per_sample = cycles_per_sample;
  while (auto f = reader.next()) {
    CycleRecord r;
    r.cycle = csv::to_long((*f)[0]);
    r.t = csv::to_double((*f)[1]);
    r.i = static_cast<int>(csv::to_long((*f)[2]));
    r.c = static_cast<int>(csv::to_long((*f)[3]));
    int col = 4;
    for (JointVec* v : {&r.q, &r.qd, &r.qdd, &r.qddd})
      for (int c = 0; c < kNumJoints; ++c) (*v)[c] = csv::to_double((*f)[col++]);
    r.clamped = static_cast<std::uint8_t>(csv::to_long((*f)[col]));
    if (!log.cycles.empty() && r.cycle != log.cycles.back().cycle + 1)
      throw std::runtime_error("trajectory CSV: cycles must be consecutive");
    log.cycles.push_back(r);
  }
  return log;
}

void write_audit_csv(std::ostream& os, const AuditReport& report) {
  os << "i,c,err_m\n";
  for (size_t i = 0; i < report.position_error.size(); ++i)
    os << i << ',' << report.sample_c[i] << ',' << csv::num(report.position_error[i]) << '\n';
}

void write_samples_csv(std::ostream& os, const TrajectoryLog& log) {
  os << "i,j,c,q1,q2,q3,q4,q5,q6,q7\n";
  for (const SampleRecord& s : log.samples) {
    os << s.i << ',' << s.j << ',' << s.c;
    for (int c = 0; c < kNumJoints; ++c) os << ',' << csv::num(s.q_plan[c]);
    os << '\n';
  }
}

}  // namespace adjplan
