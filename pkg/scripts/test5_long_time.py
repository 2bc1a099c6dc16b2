"""Long-time periodic run with zero-dissipation kinetics: sign changes of w and its amplitude."""

import argparse

import numpy as np

from ncshock.harness import builtin_test, count_sign_changes, run, shock_positions, write_run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, nargs="+", default=[2000])
    ap.add_argument("--scheme", default="RecNC")
    ap.add_argument("--times", type=float, nargs="+", default=[5, 10, 20, 30, 40])
    ap.add_argument("--out", default="results/test5")
    args = ap.parse_args()

    for n in args.cells:
        cfg = builtin_test("5", args.scheme).with_overrides(n_cells=n, t_final=max(args.times),
                                                            snapshot_times=tuple(args.times))
        res = run(cfg)
        write_run(res, f"{args.out}/{args.scheme}_{n}")
        print(f"{args.scheme} {n} cells, {res.metadata['n_steps']} steps, "
              f"{res.metadata['wall_time_s']:.1f} s")
        for snap in res.snapshots:
            print(f"  t={snap.time:5.1f}  sign changes {count_sign_changes(snap)} "
                  f"(circular {count_sign_changes(snap, circular=True)})  max|w| {np.max(np.abs(snap.w)):.4f}  "
                  f"at {np.round(shock_positions(snap), 4).tolist()}")


if __name__ == "__main__":
    main()
