"""Isolated nonclassical shock: RecNC against Godunov with the nonclassical solver."""

import argparse

import numpy as np

from ncshock.harness import ExactRiemann, builtin_test, l1_error, run, shock_positions, write_run
from ncshock.model import State


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/test1")
    args = ap.parse_args()

    cfg = builtin_test("1")
    exact = ExactRiemann(cfg.model, State(-10.0, -6.0), State(110.0, 9.0), cfg.t_final)
    for scheme in ("RecNC", "Godunov"):
        res = run(cfg.with_overrides(scheme=scheme))
        snap = res.final
        ev, ew = exact.project(snap.left_edge + snap.dx * np.arange(snap.n_cells + 1))
        err = max(np.max(np.abs(snap.v - ev)), np.max(np.abs(snap.w - ew)))
        print(f"{scheme:8s} steps {res.metadata['n_steps']:4d}  max cell error {err:.2e}  "
              f"L1 (v, w) {l1_error(snap, exact)}  sign changes at {[round(float(x), 6) for x in shock_positions(snap)]}")
        write_run(res, f"{args.out}/{scheme}")
    print(f"exact shock position {-8.0 * cfg.t_final}")


if __name__ == "__main__":
    main()
