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

#include "adjplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

namespace adjplan {

using json = nlohmann::json;

StepConstraint StepConstraint::with_margins(const Limits& limits, double sample_interval, const JointVec& qd_plan,
                                            const JointVec& margin) {
  StepConstraint sc;
  sc.sample_interval = sample_interval;
  sc.qd_plan = qd_plan;
  sc.q_lo = limits.q_min + margin;
  sc.q_hi = limits.q_max - margin;
  sc.validate(limits);
  return sc;
}

StepConstraint StepConstraint::with_defaults(const Limits& limits, double sample_interval, double plan_fraction) {
  JointVec margin = limits.qd_max.cwiseProduct(limits.qd_max).cwiseQuotient(2 * limits.qdd_max);
  return with_margins(limits, sample_interval, plan_fraction * limits.qd_max, margin);
}

void StepConstraint::validate(const Limits& limits) const {
  if (!(sample_interval > 0)) throw std::invalid_argument("sample interval must be positive");
  if ((qd_plan.array() <= 0).any()) throw std::invalid_argument("planning velocity must be positive");
  if ((qd_plan.array() > limits.qd_max.array()).any())
    throw std::invalid_argument("planning velocity exceeds the joint velocity limit");
  if ((q_lo.array() > q_hi.array()).any()) throw std::invalid_argument("angle margins leave an empty joint range");
  if ((q_lo.array() < limits.q_min.array()).any() || (q_hi.array() > limits.q_max.array()).any())
    throw std::invalid_argument("reduced angle bounds exceed the joint limits");
}

DPTable::DPTable(int num_points, int m, int o) : num_points_(num_points), m_(m), o_(o) {
  if (num_points < 2 || m < 1 || o < 1) throw std::invalid_argument("DP table dimensions out of range");
  if (m > std::numeric_limits<std::int16_t>::max()) throw std::invalid_argument("too many q7 samples");
  size_t cells = static_cast<size_t>(num_points) * m * (2 * o + 1);
  values_.assign(cells, kAbsent);
  successors_.assign(cells * (2 * o + 1), static_cast<std::int16_t>(kNone));
}

size_t DPTable::cell(int i, int j, int k) const {
  if (i < 0 || i >= num_points_ || j < 0 || j >= m_ || k < -o_ || k > o_)
    throw std::out_of_range("DP table index out of range");
  return (static_cast<size_t>(i) * m_ + j) * (2 * o_ + 1) + (k + o_);
}

int DPTable::successor(int i, int j, int k, int k_next) const {
  if (k_next < -o_ || k_next > o_) throw std::out_of_range("adjustment index outside [-o, o]");
  return successors_[cell(i, j, k) * (2 * o_ + 1) + (k_next + o_)];
}

void DPTable::set_successor(int i, int j, int k, int k_next, int j_next) {
  if (k_next < -o_ || k_next > o_) throw std::out_of_range("adjustment index outside [-o, o]");
  successors_[cell(i, j, k) * (2 * o_ + 1) + (k_next + o_)] = static_cast<std::int16_t>(j_next);
}

int DPTable::saturation(int i, int k) const { return i == n() - 1 ? o_ + std::abs(k) : 2 * o_; }

int DPTable::effective_L(int i, int j, int k) const {
  int v = L(i, j, k);
  if (v < 0) return v;
  if (i == n() || v >= saturation(i, k)) return kUnbounded;
  return v;
}

bool DPTable::operator==(const DPTable& other) const {
  return num_points_ == other.num_points_ && m_ == other.m_ && o_ == other.o_ && values_ == other.values_ &&
         successors_ == other.successors_ && d_max == other.d_max && j0 == other.j0 &&
         constraint.sample_interval == other.constraint.sample_interval &&
         constraint.qd_plan == other.constraint.qd_plan && constraint.q_lo == other.constraint.q_lo &&
         constraint.q_hi == other.constraint.q_hi && provenance == other.provenance;
}

namespace {

// Usable cells (present and inside the reduced bounds), flattened like DPTable.
std::vector<std::uint8_t> usable_cells(const FeasibilityGrid& grid, const StepConstraint& sc) {
  std::vector<std::uint8_t> out;
  out.reserve(grid.num_cells());
  for (int i = 0; i < grid.num_points(); ++i)
    for (int j = 0; j < grid.m(); ++j)
      for (int k = -grid.o(); k <= grid.o(); ++k)
        out.push_back(grid.present(i, j, k) && sc.usable(grid.at(i, j, k)));
  return out;
}

size_t flat(const FeasibilityGrid& grid, int i, int j, int k) {
  return (static_cast<size_t>(i) * grid.m() + j) * (2 * grid.o() + 1) + (k + grid.o());
}

// Successor preference: larger envelope, then smaller q7 change, then lower j.
bool better_successor(int value, int j_cand, int best_value, int best_j, int j, const RedundancyGrid& q7) {
  if (best_j < 0) return true;
  if (value != best_value) return value > best_value;
  double dc = std::abs(q7.value(j_cand) - q7.value(j));
  double db = std::abs(q7.value(best_j) - q7.value(j));
  if (dc != db) return dc < db;
  return j_cand < best_j;
}

}  // namespace

DPTable compute_dp(const FeasibilityGrid& grid, const StepConstraint& sc) {
  const int n = grid.n(), m = grid.m(), o = grid.o();
  DPTable table(grid.num_points(), m, o);
  table.constraint = sc;
  const auto usable = usable_cells(grid, sc);

  for (int j = 0; j < m; ++j)
    for (int k = -o; k <= o; ++k)
      if (usable[flat(grid, n, j, k)]) table.set_L(n, j, k, 0);

  std::vector<int> best(2 * o + 1), best_j(2 * o + 1);
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < m; ++j) {
      for (int k = -o; k <= o; ++k) {
        if (!usable[flat(grid, i, j, k)]) continue;
        const JointVec q = grid.at(i, j, k);
        for (int kn = -o; kn <= o; ++kn) {
          int& bv = best[kn + o];
          int& bj = best_j[kn + o];
          bv = DPTable::kStuck;
          bj = DPTable::kNone;
          for (int jn = 0; jn < m; ++jn) {
            if (!usable[flat(grid, i + 1, jn, kn)]) continue;
            int v = table.effective_L(i + 1, jn, kn);
            if (v < 0 || !sc.step_ok(q, grid.at(i + 1, jn, kn))) continue;
            if (better_successor(v, jn, bv, bj, j, grid.q7_grid())) {
              bv = v;
              bj = jn;
            }
          }
        }
        // Largest d with best[k+e] >= d for every in-grid |e| <= d.
        int cap = table.saturation(i, k);
        int d = DPTable::kStuck;
        for (int cand = 0; cand <= cap; ++cand) {
          bool ok = true;
          for (int e = -cand; e <= cand && ok; ++e) {
            int kn = k + e;
            if (kn < -o || kn > o) continue;
            ok = best[kn + o] >= cand;
          }
          if (!ok) break;
          d = cand;
        }
        table.set_L(i, j, k, d);
        for (int kn = std::max(-o, k - d); kn <= std::min(o, k + d); ++kn)
          table.set_successor(i, j, k, kn, best_j[kn + o]);
      }
    }
  }

  // Start cell: largest envelope, ties to the lowest branch index.
  for (int j = 0; j < m; ++j) {
    int v = table.L(0, j, 0);
    if (v > table.d_max) {
      table.d_max = v;
      table.j0 = j;
    }
  }
  if (table.d_max < 0) table.j0 = -1;
  return table;
}

AdjustStep max_adjust_step(const DPTable& table, const AdjustmentGrid& adjust_grid) {
  if (!table.has_feasible_start()) throw InfeasiblePathError();
  if (adjust_grid.o() != table.o()) throw std::invalid_argument("adjustment grid does not match the DP table");
  return {table.d_max, table.j0, table.d_max * adjust_grid.spacing()};
}

NextJoints next_joints(const DPTable& table, const FeasibilityGrid& grid, int i, int j, int k, int k_next) {
  if (i < 0 || i >= table.n()) throw std::out_of_range("next_joints: sample index must lie in [0, n)");
  if (k_next < -table.o() || k_next > table.o())
    throw AdjustmentStepError("adjustment step too large: target outside [-o, o]");
  int bound = table.L(i, j, k);
  if (std::abs(k_next - k) > bound)
    throw AdjustmentStepError("adjustment step too large: |" + std::to_string(k_next - k) + "| exceeds L = " +
                              std::to_string(bound));
  int jn = table.successor(i, j, k, k_next);
  if (jn == DPTable::kNone) throw std::logic_error("DP table lacks a required successor");
  return {jn, grid.at(i + 1, jn, k_next)};
}

namespace {

class GameSearch {
 public:
  GameSearch(const FeasibilityGrid& grid, const StepConstraint& sc)
      : grid_(grid), sc_(sc), usable_(usable_cells(grid, sc)) {}

  bool usable(int i, int j, int k) const { return usable_[flat(grid_, i, j, k)] != 0; }

  // Whether every adjustment sequence with steps <= d from (x, j, c) can be
  // answered to the end of the path.
  bool wins(int x, int j, int c, int d) const {
    if (x == grid_.n()) return true;
    const JointVec q = grid_.at(x, j, c);
    for (int cn = std::max(-grid_.o(), c - d); cn <= std::min(grid_.o(), c + d); ++cn) {
      bool answered = false;
      for (int jn = 0; jn < grid_.m() && !answered; ++jn)
        answered = usable(x + 1, jn, cn) && sc_.step_ok(q, grid_.at(x + 1, jn, cn)) && wins(x + 1, jn, cn, d);
      if (!answered) return false;
    }
    return true;
  }

 private:
  const FeasibilityGrid& grid_;
  const StepConstraint& sc_;
  std::vector<std::uint8_t> usable_;
};

}  // namespace

std::vector<int> brute_force_L(const FeasibilityGrid& grid, const StepConstraint& sc) {
  if (grid.num_points() > 6 || grid.m() > 5 || grid.o() > 3)
    throw std::invalid_argument("brute_force_L: instance too large for exhaustive search");
  GameSearch game(grid, sc);
  const int n = grid.n(), o = grid.o();
  std::vector<int> out;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < grid.m(); ++j)
      for (int k = -o; k <= o; ++k) {
        if (!game.usable(i, j, k)) {
          out.push_back(DPTable::kAbsent);
          continue;
        }
        if (i == n) {
          out.push_back(0);
          continue;
        }
        int cap = (i == n - 1) ? o + std::abs(k) : 2 * o;
        int best = DPTable::kStuck;
        for (int d = 0; d <= cap; ++d)
          if (game.wins(i, j, k, d)) best = d;
        out.push_back(best);
      }
  return out;
}

std::vector<int> flatten_L(const DPTable& table) {
  std::vector<int> out;
  for (int i = 0; i < table.num_points(); ++i)
    for (int j = 0; j < table.m(); ++j)
      for (int k = -table.o(); k <= table.o(); ++k) out.push_back(table.L(i, j, k));
  return out;
}

std::vector<TableViolation> verify_table(const DPTable& table, const FeasibilityGrid& grid,
                                         const StepConstraint& sc) {
  std::vector<TableViolation> out;
  if (table.num_points() != grid.num_points() || table.m() != grid.m() || table.o() != grid.o()) {
    out.push_back({-1, -1, 0, "table dimensions do not match the grid"});
    return out;
  }
  const int n = table.n(), m = table.m(), o = table.o();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = -o; k <= o; ++k) {
        auto flag = [&](std::string what) { out.push_back({i, j, k, std::move(what)}); };
        const bool usable = grid.present(i, j, k) && sc.usable(grid.at(i, j, k));
        const int v = table.L(i, j, k);
        if (!usable) {
          if (v != DPTable::kAbsent) flag("value stored for an unusable cell");
          continue;
        }
        if (v < DPTable::kStuck) {
          flag("usable cell marked absent");
          continue;
        }
        if (i == n) {
          if (v != 0) flag("final-stage value must be 0");
          continue;
        }
        if (v > table.saturation(i, k)) flag("value exceeds the saturation cap");
        const JointVec q = grid.at(i, j, k);
        for (int kn = std::max(-o, k - v); kn <= std::min(o, k + v); ++kn) {
          int jn = table.successor(i, j, k, kn);
          if (jn < 0 || jn >= m) {
            flag("missing successor for k_next = " + std::to_string(kn));
            continue;
          }
          if (!grid.present(i + 1, jn, kn) || !sc.usable(grid.at(i + 1, jn, kn))) {
            flag("successor cell is unusable for k_next = " + std::to_string(kn));
            continue;
          }
          if (!sc.step_ok(q, grid.at(i + 1, jn, kn)))
            flag("successor breaks the step bound for k_next = " + std::to_string(kn));
          if (table.effective_L(i + 1, jn, kn) < v)
            flag("successor envelope smaller than the cell's for k_next = " + std::to_string(kn));
        }
      }
  int best = DPTable::kStuck;
  for (int j = 0; j < m; ++j) best = std::max(best, table.L(0, j, 0));
  if (table.d_max != best) out.push_back({0, table.j0, 0, "d_max differs from the largest start value"});
  if (table.d_max >= 0 && (table.j0 < 0 || table.j0 >= m || table.L(0, table.j0, 0) != table.d_max))
    out.push_back({0, table.j0, 0, "j0 does not attain d_max"});
  return out;
}

void save_table_json(std::ostream& os, const DPTable& table) {
  const auto& sc = table.constraint;
  auto vec = [](const JointVec& v) { return std::vector<double>(v.data(), v.data() + kNumJoints); };
  json doc;
  doc["schema"] = 1;
  doc["num_points"] = table.num_points();
  doc["m"] = table.m();
  doc["o"] = table.o();
  doc["provenance"] = table.provenance;
  doc["sample_interval"] = sc.sample_interval;
  doc["qd_plan"] = vec(sc.qd_plan);
  doc["q_lo"] = vec(sc.q_lo);
  doc["q_hi"] = vec(sc.q_hi);
  doc["d_max"] = table.d_max;
  doc["j0"] = table.j0;
  doc["L"] = flatten_L(table);
  // Successors only inside each cell's admissible window, in cell order.
  std::vector<int> succ;
  for (int i = 0; i < table.n(); ++i)
    for (int j = 0; j < table.m(); ++j)
      for (int k = -table.o(); k <= table.o(); ++k) {
        int v = table.L(i, j, k);
        for (int kn = std::max(-table.o(), k - v); v >= 0 && kn <= std::min(table.o(), k + v); ++kn)
          succ.push_back(table.successor(i, j, k, kn));
      }
  doc["successors"] = std::move(succ);
  os << doc.dump() << '\n';
}

DPTable load_table_json(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("DP table: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("schema").get<int>() != 1) throw std::runtime_error("DP table: unsupported schema");
    DPTable table(doc.at("num_points").get<int>(), doc.at("m").get<int>(), doc.at("o").get<int>());
    auto vec = [&](const char* key) {
      auto v = doc.at(key).get<std::vector<double>>();
      if (v.size() != kNumJoints) throw std::runtime_error(std::string("DP table: bad length for ") + key);
      return JointVec(Eigen::Map<const JointVec>(v.data()));
    };
    table.provenance = doc.at("provenance").get<std::string>();
    table.constraint.sample_interval = doc.at("sample_interval").get<double>();
    table.constraint.qd_plan = vec("qd_plan");
    table.constraint.q_lo = vec("q_lo");
    table.constraint.q_hi = vec("q_hi");
    table.d_max = doc.at("d_max").get<int>();
    table.j0 = doc.at("j0").get<int>();
    auto L = doc.at("L").get<std::vector<int>>();
    auto succ = doc.at("successors").get<std::vector<int>>();
    const int o = table.o();
    if (L.size() != static_cast<size_t>(table.num_points()) * table.m() * (2 * o + 1))
      throw std::runtime_error("DP table: value array has the wrong length");
    size_t pos = 0, s = 0;
    for (int i = 0; i < table.num_points(); ++i)
      for (int j = 0; j < table.m(); ++j)
        for (int k = -o; k <= o; ++k) {
          int v = L[pos++];
          if (v < DPTable::kAbsent || v > 2 * o) throw std::runtime_error("DP table: value out of range");
          table.set_L(i, j, k, v);
          if (i == table.n()) continue;
          for (int kn = std::max(-o, k - v); v >= 0 && kn <= std::min(o, k + v); ++kn) {
            if (s >= succ.size()) throw std::runtime_error("DP table: successor array too short");
            int jn = succ[s++];
            if (jn < DPTable::kNone || jn >= table.m()) throw std::runtime_error("DP table: successor out of range");
            table.set_successor(i, j, k, kn, jn);
          }
        }
    if (s != succ.size()) throw std::runtime_error("DP table: successor array too long");
    return table;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("DP table: ") + e.what());
  }
}

}  // namespace adjplan
