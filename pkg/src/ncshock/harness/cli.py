"""Command line entry point ``ncshock``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..model import ModelParams, State
from ..riemann import RiemannError, sample_fan, solve_riemann
from ..scheme import SchemeError
from .config import TEST_IDS, RunConfig, builtin_test
from .runner import RunError, run, write_run
from .study import CLOSE_GAP, compare, histogram_config, histogram_study


def _pair(text: str) -> State:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'v,w', got {text!r}")
    return State(float(parts[0]), float(parts[1]))


def _load_config(args) -> RunConfig:
    if (args.test is None) == (args.config is None):
        raise ValueError("give exactly one of --test or --config")
    cfg = builtin_test(args.test) if args.test is not None else RunConfig.load(args.config)
    overrides = {}
    if getattr(args, "scheme", None):
        overrides["scheme"] = args.scheme
    if getattr(args, "cells", None):
        overrides["n_cells"] = args.cells
    if getattr(args, "cfl", None):
        overrides["cfl"] = args.cfl
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "t_final", None):
        overrides["t_final"] = args.t_final
        overrides["snapshot_times"] = tuple(t for t in cfg.snapshot_times if t <= args.t_final)
    if getattr(args, "out", None):
        overrides["output_dir"] = args.out
    return cfg.with_overrides(**overrides) if overrides else cfg


def cmd_run(args) -> int:
    cfg = _load_config(args)
    result = run(cfg)
    path = write_run(result, cfg.output_dir)
    cfg.save(Path(cfg.output_dir) / "config.yaml")
    meta = result.metadata
    print(json.dumps({"scheme": meta["scheme"], "steps": meta["n_steps"],
                      "snapshots": [s.time for s in result.snapshots],
                      "mass_initial": meta["mass_initial"], "mass_final": meta["mass_final"],
                      "metadata": str(path)}))
    return 0


def cmd_config(args) -> int:
    sys.stdout.write(_load_config(args).dumps())
    return 0


def cmd_riemann(args) -> int:
    params = ModelParams(args.m, args.beta)
    fan = solve_riemann(params, args.left, args.right)
    out = fan.to_dict()
    if args.sample is not None:
        out["sample"] = {"xi": args.sample, "state": list(sample_fan(params, fan, args.sample))}
    print(json.dumps(out, indent=1))
    return 0


def cmd_compare(args) -> int:
    base = builtin_test(args.test)
    if args.cells:
        base = base.with_overrides(n_cells=args.cells)
    if args.t_final:
        base = base.with_overrides(t_final=args.t_final,
                                   snapshot_times=tuple(t for t in base.snapshot_times if t <= args.t_final))
    schemes = [s for s in args.schemes.split(",") if s]
    compare(base, schemes, args.out, seed=args.seed)
    print(json.dumps({"test": args.test, "schemes": schemes, "out": args.out,
                      "times": list(base.output_times)}))
    return 0


def cmd_histogram(args) -> int:
    if str(args.test) != "5":
        raise ValueError("the histogram study is defined for test 5 only")
    cfg = histogram_config(args.cells, args.t_final)
    result = histogram_study(cfg, args.n, seed_base=args.seed_base, gap=args.gap, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.write_csv(out / "histogram.csv")
    counts, edges = result.histogram(args.bins)
    print(json.dumps({"realizations": args.n, "occurrences": result.occurrences, "gap": args.gap,
                      "bins": edges.tolist(), "counts": counts.tolist(),
                      "csv": str(out / "histogram.csv")}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncshock", description="Nonclassical shock experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("--test", choices=TEST_IDS)
        p.add_argument("--config", help="flat YAML run configuration")
        p.add_argument("--scheme", help="RecNC, RecNCC, Godunov or Glimm")
        p.add_argument("--cells", type=int)
        p.add_argument("--cfl", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--t-final", type=float)

    p = sub.add_parser("run", help="run one configuration and write snapshots")
    source(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("config", help="print a configuration as YAML")
    source(p)
    p.add_argument("--out", help="output directory stored in the config")
    p.set_defaults(func=cmd_config)

    p = sub.add_parser("riemann", help="solve one Riemann problem and print the fan as JSON")
    p.add_argument("--left", type=_pair, required=True, help="vL,wL")
    p.add_argument("--right", type=_pair, required=True, help="vR,wR")
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sample", type=float, help="also print the state at ray x/t = XI")
    p.set_defaults(func=cmd_riemann)

    p = sub.add_parser("compare", help="run several schemes and project them on one grid")
    p.add_argument("--test", choices=TEST_IDS, required=True)
    p.add_argument("--schemes", required=True, help="comma list, e.g. RecNC,RecNCC,Glimm:8")
    p.add_argument("--cells", type=int)
    p.add_argument("--t-final", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="compare")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("histogram", help="Glimm histogram of the first shock position")
    p.add_argument("--test", default="5")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--cells", type=int, default=2000)
    p.add_argument("--t-final", type=float, default=20.0)
    p.add_argument("--gap", type=float, default=CLOSE_GAP)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="histogram")
    p.set_defaults(func=cmd_histogram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RunError, RiemannError, SchemeError, OSError) as exc:
        print(f"ncshock {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
