#!/usr/bin/env python3
"""Regenerate every figure CSV from configs/ and print a one-line summary each.

    python scripts/reproduce_figures.py [--out results] [--jobs 4]
"""

import argparse
from pathlib import Path

import numpy as np

from kerrcoupler.cli import run_one
from kerrcoupler.series import read_csv

ROOT = Path(__file__).resolve().parents[1]


def summarise(path: Path) -> str:
    ts = read_csv(path)
    parts = []
    for name in ts.columns:
        if name == "chi_t":
            continue
        col = ts.column(name)
        if np.all(np.isnan(col)):
            parts.append(f"{name}: all null")
            continue
        k = int(np.nanargmax(col))
        parts.append(f"max {name}={col[k]:.4g} @ t={ts.times[k]:.4g}")
    return f"{path.name:28s} " + ", ".join(parts)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default=ROOT / "configs", type=Path)
    ap.add_argument("--out", default=ROOT / "results", type=Path)
    args = ap.parse_args()

    for cfg in sorted(args.configs.glob("*.cfg")):
        out = run_one(cfg, out_dir=args.out)
        print(summarise(out))


if __name__ == "__main__":
    main()
