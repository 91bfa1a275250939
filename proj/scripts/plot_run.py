# Copyright 2026 The adjplan Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Plots a simulate/baseline output directory.

Usage: python3 scripts/plot_run.py OUT_DIR [--save PREFIX]
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

# Franka Panda limits, same values as the library defaults.
Q_MIN = [-2.8973, -1.7628, -2.8973, -3.0718, -2.8973, -0.0175, -2.8973]
Q_MAX = [2.8973, 1.7628, 2.8973, -0.0698, 2.8973, 3.7525, 2.8973]
QD_MAX = [2.175, 2.175, 2.175, 2.175, 2.61, 2.61, 2.61]
QDD_MAX = [15, 7.5, 10, 12.5, 15, 20, 20]
QDDD_MAX = [7500, 3750, 5000, 6250, 7500, 10000, 10000]


def normalized(traj):
    out = {}
    for c in range(7):
        lo, hi = Q_MIN[c], Q_MAX[c]
        out[f"q{c + 1}"] = (2 * traj[f"q{c + 1}"] - (hi + lo)) / (hi - lo)
        out[f"qd{c + 1}"] = traj[f"qd{c + 1}"] / QD_MAX[c]
        out[f"qdd{c + 1}"] = traj[f"qdd{c + 1}"] / QDD_MAX[c]
        out[f"qddd{c + 1}"] = traj[f"qddd{c + 1}"] / QDDD_MAX[c]
    return pd.DataFrame(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--save", help="write PNGs with this prefix instead of showing")
    args = ap.parse_args()

    traj = pd.read_csv(args.out_dir / "trajectory.csv")
    norm = normalized(traj)
    fig, axes = plt.subplots(4, 1, sharex=True, figsize=(9, 10))
    for ax, prefix, label in zip(axes, ["q", "qd", "qdd", "qddd"], ["angle", "velocity", "acceleration", "jerk"]):
        for c in range(7):
            ax.plot(traj["t"], norm[f"{prefix}{c + 1}"], lw=0.8, label=f"joint {c + 1}")
        ax.set_ylabel(f"normalized {label}")
        ax.set_ylim(-1.1, 1.1)
    axes[0].legend(ncol=7, fontsize="small")
    axes[-1].set_xlabel("t [s]")
    fig.tight_layout()

    figs = {"limits": fig}
    audit_path = args.out_dir / "audit.csv"
    if audit_path.exists():
        audit = pd.read_csv(audit_path)
        f2, ax = plt.subplots(figsize=(9, 3))
        ax.plot(audit["i"], audit["err_m"], marker=".")
        ax.set_xlabel("sampling point")
        ax.set_ylabel("position error [m]")
        f2.tight_layout()
        figs["error"] = f2

    cmp_path = args.out_dir / "comparison.csv"
    if cmp_path.exists():
        cmp = pd.read_csv(cmp_path)
        f3, ax = plt.subplots(figsize=(9, 3))
        ax.plot(cmp["i"], cmp["planned_q7"], label="planned")
        ax.plot(cmp["i"], cmp["baseline_q7"], label="baseline")
        ax.axhline(Q_MIN[6], color="k", ls=":")
        ax.axhline(Q_MAX[6], color="k", ls=":")
        ax.set_xlabel("sampling point")
        ax.set_ylabel("q7 [rad]")
        ax.legend()
        f3.tight_layout()
        figs["q7"] = f3

    if args.save:
        for name, f in figs.items():
            f.savefig(f"{args.save}_{name}.png", dpi=120)
    else:
        plt.show()


if __name__ == "__main__":
    main()
