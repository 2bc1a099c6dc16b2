"""Perturbations of a classical shock: spike at eps = 0, thin classical/nonclassical pair otherwise."""

import argparse

from ncshock.harness import builtin_test, locate_jump, run, spike_diagnostics, write_run
from ncshock.model import State
from ncshock.riemann import solve_riemann


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scheme", default="RecNCC")
    ap.add_argument("--out", default="results/test3")
    args = ap.parse_args()

    for tid in ("3a", "3b", "3c"):
        cfg = builtin_test(tid, args.scheme)
        res = run(cfg)
        snap = res.final
        write_run(res, f"{args.out}/{tid}_{args.scheme}")
        fan = solve_riemann(cfg.model, State(*cfg.initial.values[0]), State(*cfg.initial.values[1]))
        T = cfg.t_final
        print(f"test {tid}: {[w.kind.value for w in fan.waves]}")
        first = fan.waves[0]
        if len(fan.waves) == 1 or fan.waves[1].family == 2:
            x = first.speed_lo * T
            sp = spike_diagnostics(snap, x - 0.1, x + 0.1, first.left.w, first.right.w)
            print(f"  spike peak {sp.peak:.6f} height {sp.height:.4f} width {sp.width} cells")
            continue
        gap = fan.waves[1].speed_lo - first.speed_lo
        mid = 0.5 * (first.speed_lo + fan.waves[1].speed_lo) * T
        for wave, (lo, hi) in zip(fan.waves[:2], [(mid - 0.1, mid), (mid, mid + 0.1)]):
            pos = locate_jump(snap, lo, hi, wave.left.w, wave.right.w)
            print(f"  {wave.kind.value:18s} exact {wave.speed_lo * T:.5f} located {pos:.5f} "
                  f"({(pos - wave.speed_lo * T) / snap.dx:+.2f} cells)")
        print(f"  gap between the shocks {gap * T / snap.dx:.1f} cells")


if __name__ == "__main__":
    main()
