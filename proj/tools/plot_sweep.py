#!/usr/bin/env python3
"""Step plot of minimum bidder counts from `bafo sweep` output.

usage: plot_sweep.py sweep.csv [out.png]
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    with open(sys.argv[1], newline="") as f:
        rows = list(csv.DictReader(f))
    ps = [float(r["p"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for col in rows[0]:
        if not col.startswith("N_"):
            continue
        pts = [(p, int(r[col])) for p, r in zip(ps, rows) if r[col]]
        ax.step([p for p, _ in pts], [n for _, n in pts], where="post", label=col[2:])
    ax.set_xlabel("p")
    ax.set_ylabel("minimum number of bidders")
    ax.legend()
    fig.tight_layout()
    fig.savefig(sys.argv[2] if len(sys.argv) > 2 else "sweep.png", dpi=150)


if __name__ == "__main__":
    main()
