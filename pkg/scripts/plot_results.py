"""Figures from the CSVs written by the other scripts (needs matplotlib)."""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", type=Path, default=Path("results"))
args = ap.parse_args()

traces = sorted(args.out.glob("energy_random_Aafm*.csv"))
if traces:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for p in traces:
        d = read(p)
        ax.plot([t / 1e3 for t in d["t_fs"]], d["W_total"], label=p.stem.split("_")[-1].replace("Aafm", "A_afm "))
    ax.set_xlabel("t (ps)")
    ax.set_ylabel("W'")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out / "energy_traces.png", dpi=150)

sweeps = sorted(args.out.glob("phase_*.csv"))
if sweeps:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for p in sweeps:
        d = read(p)
        ax.plot(d["B_tesla"], d["mean_m_along_field"], "o-", ms=3, label=p.stem[6:])
    ax.set_xlabel("B (T)")
    ax.set_ylabel("<m> along field")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out / "phase_diagram.png", dpi=150)

for p in sorted(args.out.glob("convergence_*_?d.csv")):
    lines = p.read_text().splitlines()
    head = lines[0].split(",")
    rows = [list(map(float, r.split(","))) for r in lines[1:-1]]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for j, name in enumerate(head[1:], 1):
        ax.loglog([r[0] for r in rows], [r[j] for r in rows], "o-", ms=3, label=name)
    ax.set_xlabel(head[0])
    ax.set_ylabel("max error")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(p.with_suffix(".png"), dpi=150)
