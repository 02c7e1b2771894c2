#!/usr/bin/env python3
"""Plot the CSVs written by reproduce_figures.py (needs matplotlib).

    python scripts/plot_figures.py [--results results]
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from kerrcoupler.series import read_csv

ROOT = Path(__file__).resolve().parents[1]


def plot(path: Path, out_dir: Path):
    ts = read_csv(path)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    unit = ts.metadata.get("time_unit", "")
    for name in ts.columns:
        if name == "chi_t":
            continue
        ax.plot(ts.times, ts.column(name), label=name, lw=1)
    ax.set_xlabel(f"t [{unit}]")
    ax.set_title(path.stem)
    ax.legend(fontsize=8)
    fig.tight_layout()
    target = out_dir / f"{path.stem}.png"
    fig.savefig(target, dpi=120)
    plt.close(fig)
    return target


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--results", default=ROOT / "results", type=Path)
    args = ap.parse_args()
    for csv in sorted(args.results.glob("*.csv")):
        print(plot(csv, args.results))


if __name__ == "__main__":
    main()
