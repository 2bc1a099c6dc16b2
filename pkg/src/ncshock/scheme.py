"""Discontinuous-reconstruction finite volume scheme on a translating mesh.

Each step:

1. detect cells whose average looks like a smeared shock of the exact
   Riemann solution between the two neighbours;
2. place that shock inside the cell so that both ``v`` and ``w`` keep their
   cell means (cancelled unless both positions fall strictly inside);
3. move every cell with a common speed larger than all wave speeds, so an
   interface only ever sees the reconstructed profile of its upwind cell,
   and integrate the flux through it exactly.

Without reconstruction the update is the staggered (one-sided) Lax-Friedrichs
scheme written in the moving frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from numba import njit

from .model import ModelParams, State
from .riemann import (CLASSICAL, F_FAMILY, F_KIND, F_LV, F_LW, F_RV, F_RW, MAX_WAVES,
                      _c, _fan_into)


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    CONSTANT = "constant"


class MeshSignPolicy(enum.Enum):
    ALTERNATE = "alternate"
    FIXED_NEGATIVE = "negative"
    FIXED_POSITIVE = "positive"


class SchemeError(RuntimeError):
    pass


def _two_sum(hi: float, lo: float, x: float) -> tuple[float, float]:
    """Add ``x`` to the compensated pair ``(hi, lo)`` (Neumaier summation)."""
    s = hi + x
    if abs(hi) >= abs(x):
        err = (hi - s) + x
    else:
        err = (x - s) + hi
    lo = lo + err
    t = s + lo
    return t, lo - (t - s)


@dataclass(frozen=True)
class SchemeConfig:
    cfl: float = 0.45
    mesh_speed_margin: float = 0.05
    detect_classical: bool = False
    mesh_sign_policy: MeshSignPolicy = MeshSignPolicy.ALTERNATE
    # switching this off leaves the bare moving-frame Lax-Friedrichs scheme
    detect_nonclassical: bool = True

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.mesh_speed_margin <= 0.0:
            raise ValueError("mesh_speed_margin must be positive")


@dataclass
class MovingGrid:
    n_cells: int
    dx: float
    left_edge: float
    time: float
    v_avg: np.ndarray
    w_avg: np.ndarray
    boundary: Boundary = Boundary.CONSTANT
    step_index: int = 0
    # compensation terms: left_edge and time are accumulated over many steps
    edge_lo: float = 0.0
    time_lo: float = 0.0

    def __post_init__(self):
        self.v_avg = np.asarray(self.v_avg, dtype=float)
        self.w_avg = np.asarray(self.w_avg, dtype=float)
        if self.v_avg.shape != (self.n_cells,) or self.w_avg.shape != (self.n_cells,):
            raise ValueError("cell arrays must have length n_cells")
        if self.dx <= 0.0:
            raise ValueError("dx must be positive")

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def edges(self) -> np.ndarray:
        return self.left_edge + self.dx * np.arange(self.n_cells + 1)

    def centers(self) -> np.ndarray:
        return self.left_edge + self.dx * (np.arange(self.n_cells) + 0.5)

    def copy(self) -> "MovingGrid":
        return replace(self, v_avg=self.v_avg.copy(), w_avg=self.w_avg.copy())

    def mass(self) -> tuple[float, float]:
        return float(np.sum(self.v_avg) * self.dx), float(np.sum(self.w_avg) * self.dx)


@dataclass(frozen=True)
class Reconstruction:
    active: bool
    left: State
    right: State
    d_v: float
    d_w: float
    speed: float


@dataclass
class ReconstructionField:
    """Per-cell reconstruction data for a whole grid (struct of arrays)."""

    active: np.ndarray
    lv: np.ndarray
    lw: np.ndarray
    rv: np.ndarray
    rw: np.ndarray
    d_v: np.ndarray
    d_w: np.ndarray
    speed: np.ndarray

    def __getitem__(self, j: int) -> Reconstruction:
        return Reconstruction(bool(self.active[j]), State(self.lv[j], self.lw[j]),
                              State(self.rv[j], self.rw[j]), float(self.d_v[j]),
                              float(self.d_w[j]), float(self.speed[j]))

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.active))


@dataclass(frozen=True)
class StepInfo:
    dt: float
    v_mesh: float
    v_waves: float
    n_active: int


# ---------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class PiecewiseConstant:
    """Piecewise constant data: ``values[k]`` on ``[breaks[k-1], breaks[k])``.

    ``breaks`` holds the interior jump positions; the first and last values
    extend to -inf and +inf.
    """

    breaks: tuple[float, ...]
    values: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise ValueError("need one more value than breaks")
        if any(b2 <= b1 for b1, b2 in zip(self.breaks, self.breaks[1:])):
            raise ValueError("breaks must be increasing")

    def __call__(self, x):
        idx = np.searchsorted(np.asarray(self.breaks), x, side="right")
        vals = np.asarray(self.values, dtype=float)
        return vals[idx, 0], vals[idx, 1]

    def mean(self, lo: float, hi: float) -> tuple[float, float]:
        """Exact average over ``[lo, hi]``; plateau cells return the plateau value."""
        bounds = (-math.inf,) + tuple(self.breaks) + (math.inf,)
        pieces = []
        for k, val in enumerate(self.values):
            a, b = max(lo, bounds[k]), min(hi, bounds[k + 1])
            if b > a:
                pieces.append((b - a, val))
        if len(pieces) == 1:
            return float(pieces[0][1][0]), float(pieces[0][1][1])
        total = sum(length for length, _ in pieces)
        v = sum(length * val[0] for length, val in pieces) / total
        w = sum(length * val[1] for length, val in pieces) / total
        return float(v), float(w)


def riemann_data(left: State, right: State, x0: float = 0.0) -> PiecewiseConstant:
    return PiecewiseConstant((x0,), (tuple(left), tuple(right)))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def initialize(x_lo: float, x_hi: float, n_cells: int, initial_data,
               boundary: Boundary = Boundary.CONSTANT, period: Optional[float] = None) -> MovingGrid:
    """Exact cell averages of ``initial_data`` on a uniform grid.

    ``initial_data`` is a :class:`PiecewiseConstant` (averaged exactly) or a
    callable ``x -> (v, w)`` of smooth data (5-point Gauss-Legendre per cell).
    For periodic piecewise-constant data, ``period`` wraps the positions.
    """
    dx = (x_hi - x_lo) / n_cells
    edges = x_lo + dx * np.arange(n_cells + 1)
    if isinstance(initial_data, PiecewiseConstant):
        v = np.empty(n_cells)
        w = np.empty(n_cells)
        for j in range(n_cells):
            lo, hi = edges[j], edges[j + 1]
            if period is not None:
                shift = math.floor((lo - x_lo) / period) * period
                lo, hi = lo - shift, hi - shift
            v[j], w[j] = initial_data.mean(lo, hi)
    else:
        half = 0.5 * dx
        x = (edges[:-1] + half)[:, None] + half * _GL_NODES[None, :]
        vq, wq = initial_data(x)
        v = 0.5 * np.sum(np.asarray(vq) * _GL_WEIGHTS, axis=1)
        w = 0.5 * np.sum(np.asarray(wq) * _GL_WEIGHTS, axis=1)
    return MovingGrid(n_cells, dx, float(x_lo), 0.0, v, w, boundary)


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _detect_kernel(m, beta, vl, wl, vr, wr, detect_nc, detect_c, fan):
    """Desired states of the cell between ``(vl, wl)`` and ``(vr, wr)``.

    Returns ``(status, Lv, Lw, Rv, Rw)``; status 1 = found, 0 = nothing,
    -1 = Riemann solver failure.
    """
    if detect_nc and wl * wr < 0.0:
        dd = (wl - wr) * (vl - vr)
        if dd != 0.0:
            n = _fan_into(fan, m, beta, vl, wl, vr, wr)
            if n < 0:
                return -1, 0.0, 0.0, 0.0, 0.0
            if dd > 0.0:
                k = -1
                for i in range(n):
                    if fan[i, F_FAMILY] == 1:
                        k = i
                if k >= 0 and wl * fan[k, F_RW] < 0.0:
                    return 1, fan[k, F_LV], fan[k, F_LW], fan[k, F_RV], fan[k, F_RW]
            else:
                k = -1
                for i in range(n - 1, -1, -1):
                    if fan[i, F_FAMILY] == 2:
                        k = i
                if k >= 0 and wr * fan[k, F_LW] < 0.0:
                    return 1, fan[k, F_LV], fan[k, F_LW], fan[k, F_RV], fan[k, F_RW]
    if detect_c:
        fam = 0
        if (wr < wl <= 0.0 and vr < vl) or (0.0 <= wl < wr and vr > vl):
            fam = 1
        elif (wl < wr <= 0.0 and vr < vl) or (0.0 <= wr < wl and vr > vl):
            fam = 2
        if fam != 0:
            n = _fan_into(fan, m, beta, vl, wl, vr, wr)
            if n < 0:
                return -1, 0.0, 0.0, 0.0, 0.0
            count = 0
            k = -1
            for i in range(n):
                if fan[i, F_FAMILY] == fam:
                    count += 1
                    k = i
            if (count == 1 and fan[k, F_KIND] == CLASSICAL
                    and fan[k, F_LW] * fan[k, F_RW] >= 0.0):
                return 1, fan[k, F_LV], fan[k, F_LW], fan[k, F_RV], fan[k, F_RW]
    return 0, 0.0, 0.0, 0.0, 0.0


@njit(cache=True)
def _reconstruct_kernel(m, v0, w0, lv, lw, rv, rw, dx):
    """Returns ``(active, Lv, Lw, Rv, Rw, d_v, d_w, speed)``."""
    jv = lv - rv
    jw = lw - rw
    if jv != 0.0 and jw != 0.0:
        d_v = dx * (v0 - rv) / jv
        d_w = dx * (w0 - rw) / jw
        if 0.0 < d_v < dx and 0.0 < d_w < dx:
            return True, lv, lw, rv, rw, d_v, d_w, (rv - lv) / jw
    return False, v0, w0, v0, w0, 0.0, 0.0, _c(m, w0)


@njit(cache=True)
def _reconstruct_all(m, beta, v, w, dx, periodic, detect_nc, detect_c,
                     active, lv, lw, rv, rw, d_v, d_w, speed):
    n = v.shape[0]
    fan = np.zeros((MAX_WAVES, 8))
    for j in range(n):
        jl = j - 1
        jr = j + 1
        if periodic:
            jl = jl % n
            jr = jr % n
        else:
            jl = max(jl, 0)
            jr = min(jr, n - 1)
        status = 0
        dl_v = dl_w = dr_v = dr_w = 0.0
        if detect_nc or detect_c:
            status, dl_v, dl_w, dr_v, dr_w = _detect_kernel(
                m, beta, v[jl], w[jl], v[jr], w[jr], detect_nc, detect_c, fan)
        if status < 0:
            return j
        if status == 1:
            a, L_v, L_w, R_v, R_w, dv_, dw_, s_ = _reconstruct_kernel(
                m, v[j], w[j], dl_v, dl_w, dr_v, dr_w, dx)
        else:
            a, L_v, L_w, R_v, R_w, dv_, dw_, s_ = False, v[j], w[j], v[j], w[j], 0.0, 0.0, _c(m, w[j])
        active[j] = a
        lv[j] = L_v
        lw[j] = L_w
        rv[j] = R_v
        rw[j] = R_w
        d_v[j] = dv_
        d_w[j] = dw_
        speed[j] = s_
    return -1


@njit(cache=True)
def _flux_kernel(m, V, dt, dx, upwind_right_edge, active, lv, lw, rv, rw, d_v, d_w, s):
    """Time-integrated moving-frame flux ``(F_v, F_w)`` taken from one upwind cell.

    ``upwind_right_edge`` is True when the interface is the right edge of
    the cell (mesh moving left), False for its left edge (mesh moving right).
    """
    if not active:
        return (dt * (-(lw * lw * lw + m * lw) - V * lv),
                dt * (-lv - V * lw))
    fLv = -(lw * lw * lw + m * lw) - V * lv
    fLw = -lv - V * lw
    fRv = -(rw * rw * rw + m * rw) - V * rv
    fRw = -rv - V * rw
    if upwind_right_edge:
        tv = min(dt, (dx - d_v) / (s - V))
        tw = min(dt, (dx - d_w) / (s - V))
        return fRv * tv + fLv * (dt - tv), fRw * tw + fLw * (dt - tw)
    tv = min(dt, d_v / (V - s))
    tw = min(dt, d_w / (V - s))
    return fLv * tv + fRv * (dt - tv), fLw * tw + fRw * (dt - tw)


@njit(cache=True)
def _advance_kernel(m, v, w, dx, dt, V, periodic, active, lv, lw, rv, rw, d_v, d_w, s,
                    v_out, w_out):
    n = v.shape[0]
    Fv = np.empty(n + 1)
    Fw = np.empty(n + 1)
    for i in range(n + 1):
        if V < 0.0:
            c = i - 1
            right_edge = True
        else:
            c = i
            right_edge = False
        if c < 0 or c >= n:
            if periodic:
                c = c % n
            else:
                # ghost cell: constant extrapolation, never reconstructed
                c = 0 if c < 0 else n - 1
                Fv[i], Fw[i] = _flux_kernel(m, V, dt, dx, right_edge, False, v[c], w[c],
                                            v[c], w[c], 0.0, 0.0, 0.0)
                continue
        Fv[i], Fw[i] = _flux_kernel(m, V, dt, dx, right_edge, active[c], lv[c], lw[c],
                                    rv[c], rw[c], d_v[c], d_w[c], s[c])
    if periodic:
        Fv[n] = Fv[0]
        Fw[n] = Fw[0]
    for j in range(n):
        v_out[j] = v[j] - (Fv[j + 1] - Fv[j]) / dx
        w_out[j] = w[j] - (Fw[j + 1] - Fw[j]) / dx


# ---------------------------------------------------------------------------
# Python API


def detect(params: ModelParams, grid: MovingGrid, j: int,
           config: SchemeConfig = SchemeConfig()) -> Optional[tuple[State, State]]:
    """Desired (left, right) reconstructed states for cell ``j``, or None."""
    n = grid.n_cells
    if grid.periodic:
        jl, jr = (j - 1) % n, (j + 1) % n
    else:
        jl, jr = max(j - 1, 0), min(j + 1, n - 1)
    fan = np.zeros((MAX_WAVES, 8))
    status, lv, lw, rv, rw = _detect_kernel(
        params.m, params.beta, grid.v_avg[jl], grid.w_avg[jl], grid.v_avg[jr], grid.w_avg[jr],
        config.detect_nonclassical, config.detect_classical, fan)
    if status < 0:
        raise SchemeError(f"Riemann solver failed while detecting in cell {j}")
    if status == 0:
        return None
    return State(float(lv), float(lw)), State(float(rv), float(rw))


def reconstruct(params: ModelParams, cell_avg: State, desired_left: State,
                desired_right: State, dx: float) -> Reconstruction:
    a, lv, lw, rv, rw, d_v, d_w, s = _reconstruct_kernel(
        params.m, float(cell_avg[0]), float(cell_avg[1]), float(desired_left[0]),
        float(desired_left[1]), float(desired_right[0]), float(desired_right[1]), float(dx))
    return Reconstruction(bool(a), State(lv, lw), State(rv, rw), d_v, d_w, s)


def reconstruct_grid(params: ModelParams, grid: MovingGrid, config: SchemeConfig) -> ReconstructionField:
    n = grid.n_cells
    rec = ReconstructionField(np.zeros(n, dtype=np.bool_), *(np.empty(n) for _ in range(7)))
    bad = _reconstruct_all(params.m, params.beta, grid.v_avg, grid.w_avg, grid.dx, grid.periodic,
                           config.detect_nonclassical, config.detect_classical,
                           rec.active, rec.lv, rec.lw, rec.rv, rec.rw, rec.d_v, rec.d_w, rec.speed)
    if bad >= 0:
        raise SchemeError(f"Riemann solver failed in cell {bad} at step {grid.step_index}")
    return rec


def wave_speed_bound(params: ModelParams, grid: MovingGrid, rec: Optional[ReconstructionField] = None) -> float:
    """Largest sound speed over cell means and active reconstructed states."""
    wmax = np.max(np.abs(grid.w_avg))
    if rec is not None and rec.n_active:
        wmax = max(wmax, np.max(np.abs(rec.lw[rec.active])), np.max(np.abs(rec.rw[rec.active])))
    return float(math.sqrt(3.0 * wmax * wmax + params.m))


def mesh_sign(config: SchemeConfig, step_index: int) -> float:
    policy = config.mesh_sign_policy
    if policy is MeshSignPolicy.FIXED_NEGATIVE:
        return -1.0
    if policy is MeshSignPolicy.FIXED_POSITIVE:
        return 1.0
    return -1.0 if step_index % 2 == 0 else 1.0


def mesh_speed(params: ModelParams, grid: MovingGrid, rec: Optional[ReconstructionField],
               config: SchemeConfig) -> tuple[float, float]:
    """Mesh velocity and the wave speed bound it dominates."""
    v_waves = wave_speed_bound(params, grid, rec)
    return mesh_sign(config, grid.step_index) * (1.0 + config.mesh_speed_margin) * v_waves, v_waves


def time_step(dx: float, v_mesh: float, v_waves: float, cfl: float) -> float:
    return cfl * dx / (abs(v_mesh) + v_waves)


def interface_flux(params: ModelParams, i: int, grid: MovingGrid, rec: ReconstructionField,
                   v_mesh: float, dt: float) -> tuple[float, float]:
    """Time-integrated flux through moving interface ``i`` (the left edge of cell ``i``)."""
    n = grid.n_cells
    right_edge = v_mesh < 0.0
    c = i - 1 if right_edge else i
    if not 0 <= c < n:
        if grid.periodic:
            c %= n
        else:
            c = min(max(c, 0), n - 1)
            return _flux_kernel(params.m, v_mesh, dt, grid.dx, right_edge, False,
                                grid.v_avg[c], grid.w_avg[c], grid.v_avg[c], grid.w_avg[c],
                                0.0, 0.0, 0.0)
    return _flux_kernel(params.m, v_mesh, dt, grid.dx, right_edge, bool(rec.active[c]),
                        rec.lv[c], rec.lw[c], rec.rv[c], rec.rw[c], rec.d_v[c], rec.d_w[c],
                        rec.speed[c])


def advance(grid: MovingGrid, config: SchemeConfig, params: ModelParams,
            dt_max: float = math.inf) -> tuple[MovingGrid, StepInfo]:
    """One step of the reconstruction scheme; ``dt`` is clipped to ``dt_max``."""
    rec = reconstruct_grid(params, grid, config)
    v_mesh, v_waves = mesh_speed(params, grid, rec, config)
    dt = min(time_step(grid.dx, v_mesh, v_waves, config.cfl), dt_max)
    v_new = np.empty_like(grid.v_avg)
    w_new = np.empty_like(grid.w_avg)
    _advance_kernel(params.m, grid.v_avg, grid.w_avg, grid.dx, dt, v_mesh, grid.periodic,
                    rec.active, rec.lv, rec.lw, rec.rv, rec.rw, rec.d_v, rec.d_w, rec.speed,
                    v_new, w_new)
    edge, edge_lo = _two_sum(grid.left_edge, grid.edge_lo, v_mesh * dt)
    time, time_lo = _two_sum(grid.time, grid.time_lo, dt)
    new = MovingGrid(grid.n_cells, grid.dx, edge, time, v_new, w_new, grid.boundary,
                     grid.step_index + 1, edge_lo, time_lo)
    return new, StepInfo(dt, v_mesh, v_waves, rec.n_active)


def step(grid: MovingGrid, config: SchemeConfig, params: ModelParams,
         dt_max: float = math.inf) -> MovingGrid:
    return advance(grid, config, params, dt_max)[0]
