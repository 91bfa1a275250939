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

#include "adjplan/compensator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adjplan {

void ControlClock::validate() const {
  if (!(t0 > 0)) throw std::invalid_argument("communication period must be positive");
  if (!(t_r >= t0)) throw std::invalid_argument("remaining time must be at least one period");
  if (remaining < 0) throw std::invalid_argument("remaining cycle count must be non-negative");
}

DerivedLimits derived_limits(const Limits& limits, const ControlClock& clock) {
  const double horizon = static_cast<double>(clock.remaining) * clock.t0;
  DerivedLimits dl;
  dl.qdd_eff = limits.qdd_max.cwiseMin(limits.qddd_max * horizon);
  JointVec stop = limits.qdd_max * horizon -
                  limits.qdd_max.cwiseProduct(limits.qdd_max).cwiseQuotient(2 * limits.qddd_max);
  dl.qd_eff = limits.qd_max.cwiseMin(stop).cwiseMax(0.0);
  dl.qd_caution = cautionary_velocity(limits, clock.t0);
  return dl;
}

JointVec velocity_reserve(const Limits& limits, double t0) {
  if (!(t0 > 0)) throw std::invalid_argument("communication period must be positive");
  JointVec out;
  for (int c = 0; c < kNumJoints; ++c) {
    // Same update as the plant: the new acceleration acts over the next cycle.
    double a = limits.qdd_max[c], v = 0;
    const double step = limits.qddd_max[c] * t0;
    while (a > 0) {
      a = std::max(0.0, a - step);
      v += a * t0;
    }
    out[c] = v;
  }
  return out;
}

JointVec velocity_reserve_closed_form(const Limits& limits) {
  return limits.qdd_max.cwiseProduct(limits.qdd_max).cwiseQuotient(2 * limits.qddd_max);
}

JointVec cautionary_velocity(const Limits& limits, double t0) {
  return (limits.qd_max - velocity_reserve(limits, t0)).cwiseMax(0.0);
}

namespace {

struct Interval {
  double lo, hi;
};

// Narrows `cur` to its overlap with `next`; when they are disjoint the
// higher-priority `cur` wins and is collapsed onto its point nearest `next`.
Interval restrict(Interval cur, Interval next) {
  double lo = std::max(cur.lo, next.lo), hi = std::min(cur.hi, next.hi);
  if (lo <= hi) return {lo, hi};
  double p = cur.hi < next.lo ? cur.hi : cur.lo;
  return {p, p};
}

}  // namespace

Command compensate_step(const ManipulatorState& state, const JointVec& q_target, const ControlClock& clock,
                        const Limits& limits, const DerivedLimits& dl) {
  clock.validate();
  const double t0 = clock.t0;
  Command cmd;
  for (int c = 0; c < kNumJoints; ++c) {
    const double v_now = state.qd[c], a_now = state.qdd[c];
    const double v_des = (q_target[c] - state.q[c]) / clock.t_r;
    const double a_des = (v_des - v_now) / t0;

    // Everything is expressed as a bound on the next acceleration; the
    // cascade jerk -> acceleration -> velocity becomes successive narrowing.
    const double vmax = std::min(dl.qd_eff[c], dl.qd_caution[c]);
    const Interval jerk{a_now - limits.qddd_max[c] * t0, a_now + limits.qddd_max[c] * t0};
    const Interval accel{-dl.qdd_eff[c], dl.qdd_eff[c]};
    const Interval vel{(-vmax - v_now) / t0, (vmax - v_now) / t0};

    int clamps = 0;
    for (const Interval& iv : {jerk, accel, vel})
      if (a_des < iv.lo || a_des > iv.hi) ++clamps;
    Interval admissible = restrict(restrict(jerk, accel), vel);
    const double a = std::clamp(a_des, admissible.lo, admissible.hi);
    if (a != a_des) cmd.clamped |= static_cast<std::uint8_t>(1u << c);
    cmd.max_clamps = std::max(cmd.max_clamps, clamps);

    cmd.qdd[c] = a;
    cmd.qddd[c] = (a - a_now) / t0;
    cmd.qd[c] = v_now + a * t0;
    cmd.q[c] = state.q[c] + cmd.qd[c] * t0;
  }
  return cmd;
}

ManipulatorState advance(const ManipulatorState& state, const JointVec& q_cmd, double t0) {
  ManipulatorState next;
  next.q = q_cmd;
  next.qd = (q_cmd - state.q) / t0;
  next.qdd = (next.qd - state.qd) / t0;
  return next;
}

ErrorBound error_bounds(double qd_max, double qd_plan, double qdd_max) {
  if (!(qd_max > 0) || !(qd_plan > 0) || !(qdd_max > 0))
    throw std::invalid_argument("error_bounds: inputs must be positive");
  if (qd_plan >= qd_max) throw std::invalid_argument("error_bounds: planning velocity must stay below qd_max");
  const double sum = qd_max + qd_plan;
  return {sum * sum / (2 * qdd_max), 2 * qd_max * qd_max / (qdd_max * (qd_max - qd_plan))};
}

ErrorBounds error_bounds(const JointVec& qd_max, const JointVec& qd_plan, const JointVec& qdd_max) {
  ErrorBounds out;
  for (int c = 0; c < kNumJoints; ++c) {
    ErrorBound b = error_bounds(qd_max[c], qd_plan[c], qdd_max[c]);
    out.err_max[c] = b.err_max;
    out.t_max[c] = b.t_max;
  }
  return out;
}

}  // namespace adjplan
