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

// Per-cycle motion compensation: turns the joint target of the next sampling
// point into a command for the next communication cycle that respects jerk,
// acceleration and velocity bounds, with bounds that shrink towards the end
// of the motion so that the arm comes to rest on time.

#pragma once

#include <cstdint>

#include "adjplan/types.hpp"

namespace adjplan {

struct ManipulatorState {
  JointVec q = JointVec::Zero();
  JointVec qd = JointVec::Zero();
  JointVec qdd = JointVec::Zero();

  static ManipulatorState at_rest(const JointVec& q) { return {q, JointVec::Zero(), JointVec::Zero()}; }
};

struct ControlClock {
  double t0 = 0.001;       // communication period
  double t_r = 0.001;      // time left until the next sampling point
  long remaining = 0;      // communication cycles left until motion end (n_0)

  void validate() const;
};

struct DerivedLimits {
  JointVec qdd_eff;
  JointVec qd_eff;
  JointVec qd_caution;
};

/// Stop-shaped bounds: qdd_eff = min(qdd_max, qddd_max n0 t0),
/// qd_eff = clamp(qdd_max n0 t0 - qdd_max^2 / (2 qddd_max), 0, qd_max).
DerivedLimits derived_limits(const Limits& limits, const ControlClock& clock);

/// Velocity gathered while ramping acceleration from qdd_max down to zero at
/// full jerk, simulated cycle by cycle.
JointVec velocity_reserve(const Limits& limits, double t0);
/// Continuous-time counterpart of velocity_reserve: qdd_max^2 / (2 qddd_max).
JointVec velocity_reserve_closed_form(const Limits& limits);
/// qd_max minus the simulated reserve.
JointVec cautionary_velocity(const Limits& limits, double t0);

struct Command {
  JointVec q;     // q_d for the next cycle
  JointVec qd;
  JointVec qdd;
  JointVec qddd;
  std::uint8_t clamped = 0;  // bit c set when joint c was clamped
  int max_clamps = 0;        // most clamps applied to any joint this cycle
};

/// One cycle of compensation toward q_target, to be reached after clock.t_r.
Command compensate_step(const ManipulatorState& state, const JointVec& q_target, const ControlClock& clock,
                        const Limits& limits, const DerivedLimits& dl);

/// Executes a command on the kinematic plant (state derivatives are the
/// finite differences of consecutive commands).
ManipulatorState advance(const ManipulatorState& state, const JointVec& q_cmd, double t0);

struct ErrorBound {
  double err_max;  // rad
  double t_max;    // s
};
/// Worst joint error and recovery time when the arm runs at qd_max against a
/// target moving at qd_plan in the opposite direction.
ErrorBound error_bounds(double qd_max, double qd_plan, double qdd_max);

struct ErrorBounds {
  JointVec err_max;
  JointVec t_max;
};
ErrorBounds error_bounds(const JointVec& qd_max, const JointVec& qd_plan, const JointVec& qdd_max);

}  // namespace adjplan
