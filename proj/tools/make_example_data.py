"""Writes the synthetic prior-experiment tables used by the examples and tests.

The rows imitate a lab campaign: additive levels come from a short list of
round values and lean towards small fractions, and the base polymer makes up
the remainder. Re-running the script reproduces the committed files.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

PHA_LEVELS = [0.0, 0.005, 0.01, 0.02, 0.03]
PHA_WEIGHTS = [0.35, 0.25, 0.2, 0.15, 0.05]
AMINO_LEVELS = [0.0, 0.01, 0.02, 0.03, 0.05, 0.08]
AMINO_WEIGHTS = [0.3, 0.25, 0.2, 0.12, 0.08, 0.05]
METAL_LEVELS = [0.0, 0.01, 0.02, 0.04, 0.06, 0.1]
METAL_WEIGHTS = [0.3, 0.25, 0.2, 0.12, 0.08, 0.05]

AMINO = ["CS", "BN", "THAM", "MEL"]
AMINO_SUPPORTS = [("CS",), ("BN",), ("THAM",), ("MEL",), ("MEL", "CS"), ("THAM", "CS"), ("MEL", "THAM")]
METAL = ["CaBO", "ZnBO", "HNT"]


def base_rows(rng, n):
    pha = rng.choice(PHA_LEVELS, size=n, p=PHA_WEIGHTS)
    amino = rng.choice(AMINO_LEVELS, size=n, p=AMINO_WEIGHTS)
    metal = rng.choice(METAL_LEVELS, size=n, p=METAL_WEIGHTS)
    return pha, amino, metal


def write(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.4f}" for v in row])


def four_component(rng, n):
    pha, amino, metal = base_rows(rng, n)
    rows = []
    for p, a, m in zip(pha, amino, metal):
        rows.append([round(1.0 - p - a - m, 4), p, a, m])
    return rows


def nine_component(rng, n):
    pha, amino, metal = base_rows(rng, n)
    rows = []
    for p, a, m in zip(pha, amino, metal):
        amino_part = dict.fromkeys(AMINO, 0.0)
        support = AMINO_SUPPORTS[rng.integers(len(AMINO_SUPPORTS))]
        if len(support) == 1:
            amino_part[support[0]] = a
        else:
            share = round(a * rng.choice([0.25, 0.5, 0.75]), 4)
            amino_part[support[0]] = share
            amino_part[support[1]] = round(a - share, 4)
        metal_part = dict.fromkeys(METAL, 0.0)
        metal_part[METAL[rng.integers(len(METAL))]] = m
        rows.append([round(1.0 - p - a - m, 4), p] + [amino_part[k] for k in AMINO] + [metal_part[k] for k in METAL])
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--rows", type=int, default=75)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    write(args.out_dir / "case4d_experiments.csv", ["PA-56", "PhA", "amino", "metal"], four_component(rng, args.rows))
    write(args.out_dir / "case9d_experiments.csv", ["PA-56", "PhA"] + AMINO + METAL, nine_component(rng, args.rows))


if __name__ == "__main__":
    main()
