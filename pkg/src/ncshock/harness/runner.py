"""Time loop over the four schemes, snapshots and their on-disk format."""

from __future__ import annotations

import csv
import json
import math
import time as _time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..reference import RngStream, glimm_advance, godunov_advance
from ..riemann import RiemannError
from ..scheme import Boundary, MovingGrid, SchemeError, advance, initialize
from .config import RunConfig, SchemeName


class RunError(RuntimeError):
    """A scheme or solver failure, tagged with the step it happened in."""


@dataclass
class Snapshot:
    time: float
    left_edge: float
    dx: float
    v: np.ndarray
    w: np.ndarray
    x_lo: float = 0.0
    period: Optional[float] = None

    @property
    def n_cells(self) -> int:
        return self.v.shape[0]

    @property
    def x_center(self) -> np.ndarray:
        return self.left_edge + self.dx * (np.arange(self.n_cells) + 0.5)

    @classmethod
    def from_grid(cls, grid: MovingGrid, x_lo: float = 0.0, period: Optional[float] = None) -> "Snapshot":
        return cls(grid.time, grid.left_edge, grid.dx, grid.v_avg.copy(), grid.w_avg.copy(), x_lo, period)

    def windowed(self) -> "Snapshot":
        """Periodic snapshot rotated so its cells start inside ``[x_lo, x_lo + period)``.

        The rotation is a relabelling only: values are untouched and
        ``left_edge`` moves by a whole number of periods plus cells.
        """
        if self.period is None:
            return self
        wrapped = self.x_lo + np.mod(self.x_center - self.x_lo, self.period)
        first = int(np.argmin(wrapped))
        return Snapshot(self.time, float(wrapped[first] - 0.5 * self.dx), self.dx,
                        np.roll(self.v, -first), np.roll(self.w, -first), self.x_lo, self.period)

    def mass(self) -> tuple[float, float]:
        return float(np.sum(self.v) * self.dx), float(np.sum(self.w) * self.dx)


@dataclass
class RunResult:
    config: RunConfig
    snapshots: list[Snapshot]
    metadata: dict = field(default_factory=dict)

    def at(self, t: float) -> Snapshot:
        for s in self.snapshots:
            if s.time == t:
                return s
        raise KeyError(f"no snapshot at t={t}")

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]


def initial_grid(config: RunConfig) -> MovingGrid:
    return initialize(config.x_lo, config.x_hi, config.n_cells, config.initial, config.boundary,
                      period=config.period)


def make_stepper(config: RunConfig):
    """Return ``step(grid, dt_max) -> (grid, dt)`` for the configured scheme."""
    params = config.model
    sc = config.scheme_config
    if config.scheme in (SchemeName.REC_NC, SchemeName.REC_NCC):
        def step(grid, dt_max):
            new, info = advance(grid, sc, params, dt_max)
            return new, info.dt
    elif config.scheme is SchemeName.GODUNOV:
        def step(grid, dt_max):
            new, info = godunov_advance(grid, params, sc.cfl, dt_max)
            return new, info.dt
    else:
        rng = RngStream(config.seed)

        def step(grid, dt_max):
            new, info = glimm_advance(grid, params, rng, sc.cfl, dt_max)
            return new, info.dt
    return step


def run(config: RunConfig, grid: Optional[MovingGrid] = None, on_step=None) -> RunResult:
    """Advance ``config`` to ``t_final``; snapshot times are hit exactly.

    ``on_step(grid)`` is called after every step when given.
    """
    grid = initial_grid(config) if grid is None else grid
    step = make_stepper(config)
    targets = config.output_times
    mass0 = grid.mass()
    snapshots = []
    if 0.0 in targets:
        snapshots.append(Snapshot.from_grid(grid, config.x_lo, config.period))
    dts = []
    ledger = [(0, 0.0, *mass0)]
    stride = None
    wall = _time.perf_counter()
    for target in targets:
        if target == 0.0:
            continue
        while grid.time < target:
            try:
                grid, dt = step(grid, target - grid.time)
            except (SchemeError, RiemannError) as exc:
                raise RunError(f"{config.scheme.value} failed at step {grid.step_index} "
                               f"(t={grid.time!r}): {exc}") from exc
            if not (dt > 0.0 and math.isfinite(dt)):
                raise RunError(f"non-positive time step {dt!r} at step {grid.step_index}")
            # the last step lands on the target up to rounding of the sum
            if target - grid.time <= 4.0 * math.ulp(target):
                grid.time, grid.time_lo = target, 0.0
            dts.append(dt)
            if stride is None:
                stride = max(1, int(round(config.t_final / dt / max(config.mass_samples, 1))))
            if grid.step_index % stride == 0:
                ledger.append((grid.step_index, grid.time, *grid.mass()))
            if on_step is not None:
                on_step(grid)
        snapshots.append(Snapshot.from_grid(grid, config.x_lo, config.period))
    wall = _time.perf_counter() - wall
    final_mass = grid.mass()
    if ledger[-1][0] != grid.step_index:
        ledger.append((grid.step_index, grid.time, *final_mass))
    dt_arr = np.asarray(dts) if dts else np.zeros(1)
    metadata = {
        "scheme": config.scheme.value,
        "params": {"m": config.model.m, "beta": config.model.beta},
        "config": config.to_dict(),
        "seed": config.seed if config.scheme is SchemeName.GLIMM else None,
        "rng": "PCG64" if config.scheme is SchemeName.GLIMM else None,
        "n_steps": grid.step_index,
        "wall_time_s": wall,
        "dt": {"min": float(dt_arr.min()), "max": float(dt_arr.max()),
               "mean": float(dt_arr.mean()), "count": len(dts)},
        "mass_initial": list(mass0),
        "mass_final": list(final_mass),
        "mass_ledger": [list(row) for row in ledger],
    }
    return RunResult(config, snapshots, metadata)


# ---------------------------------------------------------------------------
# files


def snapshot_stem(index: int, snap: Snapshot) -> str:
    return f"snap{index:02d}_t{snap.time!r}"


def write_snapshot_csv(path, snap: Snapshot) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x_center", "v", "w"])
        for x, v, w in zip(snap.x_center, snap.v, snap.w):
            out.writerow([repr(float(x)), repr(float(v)), repr(float(w))])


def snapshot_header(snap: Snapshot) -> dict:
    return {"time": snap.time, "left_edge": snap.left_edge, "dx": snap.dx, "n_cells": snap.n_cells,
            "x_lo": snap.x_lo, "period": snap.period}


def read_snapshot(csv_path, header: dict) -> Snapshot:
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    return Snapshot(float(header["time"]), float(header["left_edge"]), float(header["dx"]),
                    data[:, 1].copy(), data[:, 2].copy(), float(header.get("x_lo", 0.0)),
                    header.get("period"))


def write_run(result: RunResult, out_dir) -> Path:
    """Write one CSV per snapshot plus ``run.json``; returns the JSON path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, snap in enumerate(result.snapshots):
        stem = snapshot_stem(k, snap)
        write_snapshot_csv(out / f"{stem}.csv", snap)
        entries.append({"file": f"{stem}.csv", **snapshot_header(snap)})
    meta = dict(result.metadata)
    meta.pop("wall_time_s", None)
    meta["snapshots"] = entries
    path = out / "run.json"
    path.write_text(json.dumps(meta, indent=1) + "\n")
    # wall time varies between runs; keep it out of the deterministic file
    (out / "timing.json").write_text(json.dumps({"wall_time_s": result.metadata.get("wall_time_s")}) + "\n")
    return path


def read_run(out_dir) -> tuple[dict, list[Snapshot]]:
    out = Path(out_dir)
    meta = json.loads((out / "run.json").read_text())
    snaps = [read_snapshot(out / e["file"], e) for e in meta["snapshots"]]
    return meta, snaps


__all__ = ["Boundary", "RunError", "RunResult", "Snapshot", "initial_grid", "make_stepper", "read_run",
           "read_snapshot", "run", "write_run", "write_snapshot_csv"]
