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
"""Feasibility map of atlas.csv over (sampling point, q7 index) for one k.

Usage: python3 scripts/plot_atlas.py OUT_DIR [--k K] [--save FILE]
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--k", type=int, default=0)
    ap.add_argument("--save")
    args = ap.parse_args()

    atlas = pd.read_csv(args.out_dir / "atlas.csv")
    sl = atlas[atlas["k"] == args.k]
    grid = sl.pivot(index="j", columns="i", values="feasible")
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.imshow(grid.values, origin="lower", aspect="auto", cmap="Greys_r", interpolation="nearest")
    ax.set_xlabel("sampling point i")
    ax.set_ylabel("q7 index j")
    ax.set_title(f"feasible cells, k = {args.k}")
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=120)
    else:
        plt.show()


if __name__ == "__main__":
    main()
