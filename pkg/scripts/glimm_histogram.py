"""First nonclassical shock position over independent Glimm realizations of the long-time test."""

import argparse
import os
from pathlib import Path

import numpy as np

from ncshock.harness import histogram_study
from ncshock.harness.study import CLOSE_GAP, histogram_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--seed-base", type=int, default=0)
    ap.add_argument("--cells", type=int, default=2000)
    ap.add_argument("--t-final", type=float, default=20.0)
    ap.add_argument("--gap", type=float, default=CLOSE_GAP)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/histogram")
    args = ap.parse_args()

    res = histogram_study(histogram_config(args.cells, args.t_final), args.n, seed_base=args.seed_base,
                          gap=args.gap, workers=args.workers)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    res.write_csv(Path(args.out) / "histogram.csv")
    counts, edges = res.histogram(20)
    for c, a, b in zip(counts, edges[:-1], edges[1:]):
        print(f"[{a:.3f}, {b:.3f})  {'#' * int(c)}")
    gaps = np.array([r.min_gap for r in res.rows])
    print(f"close pair (gap < {args.gap}) in {res.occurrences}/{args.n} realizations; "
          f"median smallest gap {np.median(gaps):.4f}")


if __name__ == "__main__":
    main()
