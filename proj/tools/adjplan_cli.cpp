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


#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "adjplan/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_file;
  std::optional<std::string> path, path_csv, signal_kind, script_csv, out;
  std::optional<int> n, m, o, step_bound;
  std::optional<double> duration, y_max, t0, plan_fraction, singular_tol;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
};

void add_options(CLI::App& app, Overrides& ov) {
  app.add_option("--config", ov.config_file, "Scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--path", ov.path, "Path source: circle, task or csv")
      ->check(CLI::IsMember({"circle", "task", "csv"}));
  app.add_option("--path-csv", ov.path_csv, "Path CSV when --path csv")->check(CLI::ExistingFile);
  app.add_option("--n", ov.n, "Index of the last sampling point (circle)")->check(CLI::PositiveNumber);
  app.add_option("--duration", ov.duration, "Path duration in seconds (circle)")->check(CLI::PositiveNumber);
  app.add_option("--m", ov.m, "Number of q7 grid values")->check(CLI::Range(2, 100000));
  app.add_option("--o", ov.o, "Adjustment grid half size")->check(CLI::Range(1, 10000));
  app.add_option("--y-max", ov.y_max, "Largest adjustment in metres")->check(CLI::PositiveNumber);
  app.add_option("--t0", ov.t0, "Communication period in seconds")->check(CLI::PositiveNumber);
  app.add_option("--plan-fraction", ov.plan_fraction, "Planning velocity as a fraction of qd_max")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--singular-tol", ov.singular_tol, "Smallest admissible singular value");
  app.add_option("--signal", ov.signal_kind, "Adjustment signal: zero, scripted or random_walk")
      ->check(CLI::IsMember({"zero", "scripted", "random_walk"}));
  app.add_option("--script", ov.script_csv, "CSV with a c column for --signal scripted")
      ->check(CLI::ExistingFile);
  app.add_option("--step-bound", ov.step_bound, "Extra cap on the per-sample adjustment step")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", ov.seed, "Random walk seed");
  app.add_option("--out", ov.out, "Output directory");
  app.add_flag("--print-config", ov.print_config, "Print the effective configuration and exit");
}

adjplan::ScenarioConfig resolve(const Overrides& ov) {
  adjplan::ScenarioConfig cfg;
  if (!ov.config_file.empty()) {
    std::ifstream in(ov.config_file);
    cfg = adjplan::parse_config(in);
  }
  if (ov.path) cfg.path = *ov.path;
  if (ov.path_csv) {
    cfg.path_csv = *ov.path_csv;
    if (!ov.path) cfg.path = "csv";
  }
  if (ov.n) cfg.n = *ov.n;
  if (ov.duration) cfg.duration = *ov.duration;
  if (ov.m) cfg.m = *ov.m;
  if (ov.o) cfg.o = *ov.o;
  if (ov.y_max) cfg.y_max = *ov.y_max;
  if (ov.t0) cfg.t0 = *ov.t0;
  if (ov.plan_fraction) cfg.plan_fraction = *ov.plan_fraction;
  if (ov.singular_tol) cfg.singular_tol = *ov.singular_tol;
  if (ov.signal_kind) {
    using Kind = adjplan::SignalSpec::Kind;
    static const std::map<std::string, Kind> kinds{
        {"zero", Kind::kZero}, {"scripted", Kind::kScripted}, {"random_walk", Kind::kRandomWalk}};
    cfg.signal.kind = kinds.at(*ov.signal_kind);
  }
  if (ov.script_csv) cfg.signal.script_csv = *ov.script_csv;
  if (ov.step_bound) cfg.signal.step_bound = *ov.step_bound;
  if (ov.seed) cfg.signal.seed = *ov.seed;
  if (ov.out) cfg.out_dir = *ov.out;
  if (cfg.path == "csv" && cfg.path_csv.empty()) throw std::runtime_error("--path csv needs --path-csv");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adjustable redundancy resolution planner and simulator"};
  app.require_subcommand(1);
  Overrides ov;
  using Stage = int (*)(const adjplan::ScenarioConfig&, std::ostream&);
  const std::pair<const char*, std::pair<const char*, Stage>> stages[] = {
      {"grid", {"Build the feasibility atlas", adjplan::run_grid}},
      {"plan", {"Build the atlas and solve the dynamic program", adjplan::run_plan}},
      {"simulate", {"Replay the plan under an adjustment signal", adjplan::run_simulate}},
      {"baseline", {"Run the greedy online resolver for comparison", adjplan::run_baseline}},
      {"verify", {"Re-check persisted artifacts", adjplan::run_verify}},
  };
  std::map<CLI::App*, Stage> dispatch;
  for (const auto& [name, entry] : stages) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    add_options(*sub, ov);
    dispatch[sub] = entry.second;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    adjplan::ScenarioConfig cfg = resolve(ov);
    if (ov.print_config) {
      adjplan::write_config(std::cout, cfg);
      return adjplan::kExitOk;
    }
    CLI::App* chosen = app.get_subcommands().front();
    return dispatch.at(chosen)(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return adjplan::kExitFailure;
  }
}
