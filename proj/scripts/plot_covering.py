#!/usr/bin/env python3
"""Plot a covering profile produced by `bratteli compactness`.

Usage:
    bratteli compactness --family pascal --d 2 --depth 200 --eps 0.1 --out out/
    python3 scripts/plot_covering.py out/covering_plot.csv covering.png
"""

import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> None:
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    series = defaultdict(list)
    with open(sys.argv[1], newline="") as fh:
        for row in csv.DictReader(fh):
            series[row["epsilon"]].append((int(row["level"]), int(row["N"])))
    fig, ax = plt.subplots(figsize=(7, 4))
    for eps, points in sorted(series.items()):
        points.sort()
        ax.step([p[0] for p in points], [p[1] for p in points], where="mid",
                label=f"eps = {eps}")
    ax.set_xlabel("level")
    ax.set_ylabel("covering number N(eps)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=150)
    print(f"wrote {sys.argv[2]}")


if __name__ == "__main__":
    main()
