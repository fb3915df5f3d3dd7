"""Plot an experiment CSV: accept rates with error bars per grid cell.

Usage: python demos/plot_results.py results.csv [out.png]
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(argv):
    if not argv:
        print(__doc__)
        return 2
    path = argv[0]
    out = argv[1] if len(argv) > 1 else "results.png"
    rows = list(csv.DictReader(open(path, encoding="utf-8")))
    if not rows:
        print("empty csv")
        return 1
    fig, ax = plt.subplots(figsize=(8, 5))
    for truth, color in (("null", "tab:blue"), ("far", "tab:red")):
        pts = [r for r in rows if r["truth"] == truth]
        if not pts:
            continue
        xs = range(len(pts))
        ys = [float(r["accept_rate"]) for r in pts]
        es = [float(r["stderr"]) for r in pts]
        labels = [f"k={r['k']} s={r['s']} n={r['n']}" for r in pts]
        ax.errorbar(xs, ys, yerr=[3 * e for e in es], fmt="o-", color=color,
                    capsize=3, label=f"truth = {truth}")
        ax.set_xticks(list(xs), labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("accept rate (3 se bars)")
    ax.set_ylim(-0.05, 1.05)
    ax.axhline(1 - 1 / 12, ls=":", c="gray", lw=1)
    ax.axhline(1 / 12, ls=":", c="gray", lw=1)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
