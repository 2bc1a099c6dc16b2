"""Riemann problem with two nonclassical shocks: wave pattern and L1 convergence."""

import argparse

from ncshock.harness import ExactRiemann, builtin_test, l1_error, run, write_run
from ncshock.model import State
from ncshock.riemann import solve_riemann


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cells", type=int, nargs="+", default=[200, 400, 800, 1600])
    ap.add_argument("--out", default="results/test2")
    args = ap.parse_args()

    cfg = builtin_test("2")
    left, right = State(6.0, 1.0), State(-10.0, 2.0)
    for wave in solve_riemann(cfg.model, left, right).waves:
        print(f"family {wave.family} {wave.kind.value:18s} {tuple(wave.left)} -> {tuple(wave.right)} "
              f"speeds [{wave.speed_lo:.4f}, {wave.speed_hi:.4f}]")
    exact = ExactRiemann(cfg.model, left, right, cfg.t_final)
    print("scheme    cells   L1(v)     L1(w)")
    for scheme in ("RecNC", "RecNCC", "Godunov"):
        for n in args.cells:
            res = run(cfg.with_overrides(scheme=scheme, n_cells=n))
            ev, ew = l1_error(res.final, exact)
            print(f"{scheme:8s} {n:6d}  {ev:.5f}  {ew:.5f}")
            write_run(res, f"{args.out}/{scheme}_{n}")


if __name__ == "__main__":
    main()
