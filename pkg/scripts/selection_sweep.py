"""Family-selection sweep over the pinned acceptance grid.

    python3 scripts/selection_sweep.py [--n 10000]

Prints one row per (family, grid point) with K to two decimals, then the
selection counts.
"""
import argparse

from delaydist.fit import compare_models
from delaydist.models import Family
from delaydist.report import format_fit_table
from delaydist.synth import SynthSpec, generate


def grid():
    for i in range(20):
        yield i, 5000 + i * 195000 / 19, 1000 + ((7 * i) % 20) * 49000 / 19


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10_000)
    args = ap.parse_args()

    rows, wins = [], {}
    for family, seed_base in [(Family.EXPONENTIAL, 1000), (Family.TRUNCATED_NORMAL, 2000)]:
        hits = 0
        for i, d_min, scale in grid():
            r = compare_models(generate(SynthSpec(family, d_min, scale, args.n, seed=seed_base + i)))
            hits += r.selected is family
            rows.append((f"{family.value}#{i} s={scale:.0f}", 100, r.k_nor, r.k_exp, r.selected.value))
        wins[family] = hits
    print(format_fit_table(rows), end="")
    for family, hits in wins.items():
        print(f"{family.value}: {hits}/20 correct")


if __name__ == "__main__":
    main()
