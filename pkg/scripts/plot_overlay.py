"""Plot a CDF overlay written by `delaydist fit TRACE --plot overlay.tsv`.

    python3 scripts/plot_overlay.py overlay.tsv [-o overlay.png]
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("tsv")
    ap.add_argument("-o", "--output", default="overlay.png")
    args = ap.parse_args()

    data = np.genfromtxt(args.tsv, delimiter="\t", names=True)
    ms = data["delay_us"] / 1000
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(ms, data["F_emp"], where="post", label="empirical", color="black")
    ax.plot(ms, data["F_exp"], label="exponential")
    ax.plot(ms, data["F_nor"], label="truncated normal", linestyle="--")
    ax.set_xlabel("delay (ms)")
    ax.set_ylabel("F(d)")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
