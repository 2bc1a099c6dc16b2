"""Multi-run studies: Glimm histogram of shock positions and scheme comparison."""

from __future__ import annotations

import csv
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analysis import (circular_gaps, close_shock_pairs, count_sign_changes, fixed_edges, resample_to_fixed_grid,
                       shock_positions)
from .config import RunConfig, SchemeName, builtin_test
from .runner import run

#: Two sign changes of ``w`` closer than this form the close-shock structure.
CLOSE_GAP = 0.05


@dataclass(frozen=True)
class Realization:
    seed: int
    first_shock: float
    n_sign_changes: int
    close_pairs: int
    # smallest distance between consecutive sign changes, inf if fewer than two
    min_gap: float = float("inf")

    @property
    def has_structure(self) -> bool:
        return self.close_pairs > 0


@dataclass(frozen=True)
class HistogramResult:
    rows: tuple[Realization, ...]
    gap: float

    @property
    def occurrences(self) -> int:
        return sum(r.has_structure for r in self.rows)

    def positions(self) -> np.ndarray:
        return np.array([r.first_shock for r in self.rows])

    def histogram(self, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.positions(), bins=bins)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["seed", "first_shock", "n_sign_changes", "close_pairs", "min_gap", "structure"])
            for r in self.rows:
                out.writerow([r.seed, repr(r.first_shock), r.n_sign_changes, r.close_pairs,
                              repr(r.min_gap), int(r.has_structure)])
            out.writerow(["# occurrences", self.occurrences, len(self.rows), f"gap={self.gap!r}", "", ""])


def realization(config: RunConfig, seed: int, gap: float = CLOSE_GAP) -> Realization:
    snap = run(dataclasses.replace(config, seed=int(seed), snapshot_times=())).final
    pos = shock_positions(snap)
    first = min(pos) if pos else float("nan")
    gaps = circular_gaps(pos, snap.period) if snap.period is not None else np.diff(np.sort(pos))
    min_gap = float(np.min(gaps)) if gaps.size else float("inf")
    return Realization(int(seed), float(first), count_sign_changes(snap, circular=snap.period is not None),
                       close_shock_pairs(snap, gap), min_gap)


def _realization_args(args):
    return realization(*args)


def histogram_study(config: RunConfig, n_realizations: int, seeds: Optional[Sequence[int]] = None,
                    seed_base: int = 0, gap: float = CLOSE_GAP, workers: int = 1) -> HistogramResult:
    """Independent Glimm realizations of ``config`` with one seed each.

    ``seeds`` defaults to ``seed_base, seed_base + 1, ...``.  Realizations
    share no state, so ``workers > 1`` runs them in separate processes with
    identical results.
    """
    if config.scheme is not SchemeName.GLIMM:
        config = dataclasses.replace(config, scheme=SchemeName.GLIMM)
    seeds = list(seeds) if seeds is not None else [seed_base + k for k in range(n_realizations)]
    if len(seeds) != n_realizations:
        raise ValueError("need one seed per realization")
    jobs = [(config, s, gap) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_realization_args, jobs))
    else:
        rows = [realization(*job) for job in jobs]
    return HistogramResult(tuple(rows), gap)


def histogram_config(n_cells: int = 2000, t_final: float = 20.0) -> RunConfig:
    """Glimm on the long-time periodic test, stopped at ``t_final``."""
    return builtin_test("5", "Glimm").with_overrides(n_cells=n_cells, t_final=t_final, snapshot_times=())


# ---------------------------------------------------------------------------
# comparison


def parse_scheme_spec(text: str) -> tuple[SchemeName, int]:
    """``"Glimm:8"`` -> (Glimm, 8): scheme name with a resolution factor."""
    name, _, factor = text.partition(":")
    return SchemeName.parse(name.strip()), int(factor) if factor else 1


def compare(base: RunConfig, schemes: Sequence[str], out_dir=None, seed: Optional[int] = None) -> dict:
    """Run each scheme and project every snapshot on ``base``'s fixed grid.

    Returns ``{time: {label: (v, w)}}`` plus the grid centres under the key
    ``"x"``.  With ``out_dir`` one CSV per snapshot time is written, with
    columns ``x, v_<label>, w_<label>, ...``.
    """
    edges = fixed_edges(base.x_lo, base.x_hi, base.n_cells)
    centers = 0.5 * (edges[:-1] + edges[1:])
    table: dict = {"x": centers}
    labels = []
    for spec in schemes:
        name, factor = parse_scheme_spec(spec)
        label = name.value if factor == 1 else f"{name.value}x{factor}"
        labels.append(label)
        cfg = base.with_overrides(scheme=name, n_cells=base.n_cells * factor)
        if seed is not None:
            cfg = cfg.with_overrides(seed=seed)
        result = run(cfg)
        for snap in result.snapshots:
            table.setdefault(snap.time, {})[label] = resample_to_fixed_grid(snap, edges)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for t in base.output_times:
            with open(out / f"compare_t{t!r}.csv", "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["x"] + [f"{c}_{lab}" for lab in labels for c in ("v", "w")])
                cols = [table[t][lab][k] for lab in labels for k in (0, 1)]
                for j, x in enumerate(centers):
                    writer.writerow([repr(float(x))] + [repr(float(col[j])) for col in cols])
    return table
