"""Reference schemes on a fixed grid: Glimm random choice and exact Godunov.

Both juxtapose exact Riemann fans at the cell interfaces.  Glimm samples the
fans at one random point per step (sharp but not conservative); Godunov
integrates the flux through the interface ray ``x/t = 0`` (conservative but
diffusive, and it converges to the classical solution).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .model import ModelParams
from .riemann import MAX_WAVES, _fan_into, _max_speed, _sample_fan_array
from .scheme import MovingGrid, SchemeError, _two_sum


@dataclass
class RngStream:
    """Seeded uniform stream for the Glimm draws.

    Backed by numpy's PCG64 bit generator, whose output for a given seed is
    fixed across platforms and numpy versions.
    """

    seed: int
    algorithm: str = "PCG64"
    _gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.algorithm != "PCG64":
            raise ValueError(f"unsupported generator {self.algorithm}")
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self) -> float:
        return float(self._gen.random())


@dataclass(frozen=True)
class ReferenceInfo:
    dt: float
    max_speed: float
    draw: float = math.nan


@njit(cache=True)
def _interface_fans(m, beta, v, w, periodic, fans, counts):
    """Fans at the n+1 interfaces (interface i sits between cells i-1 and i).

    Returns ``(bad_interface, max_speed)``; ``bad_interface`` is -1 on success.
    """
    n = v.shape[0]
    smax = 0.0
    for i in range(n + 1):
        jl = i - 1
        jr = i
        if periodic:
            jl = jl % n
            jr = jr % n
        else:
            jl = max(jl, 0)
            jr = min(jr, n - 1)
        if periodic and i == n:
            counts[i] = counts[0]
            fans[i] = fans[0]
            continue
        k = _fan_into(fans[i], m, beta, v[jl], w[jl], v[jr], w[jr])
        if k < 0:
            return i, 0.0
        counts[i] = k
        smax = max(smax, _max_speed(k, fans[i]))
        smax = max(smax, math.sqrt(3.0 * w[jl] * w[jl] + m))
    return -1, smax


@njit(cache=True)
def _side_states(v, w, i, periodic):
    n = v.shape[0]
    jl = i - 1
    jr = i
    if periodic:
        jl = jl % n
        jr = jr % n
    else:
        jl = max(jl, 0)
        jr = min(jr, n - 1)
    return v[jl], w[jl], v[jr], w[jr]


@njit(cache=True)
def _glimm_sample(m, v, w, dx, dt, r, periodic, fans, counts, v_out, w_out):
    n = v.shape[0]
    for j in range(n):
        if r < 0.5 * dx:
            i = j
            xi = r / dt
        else:
            i = j + 1
            xi = (r - dx) / dt
        vl, wl, vr, wr = _side_states(v, w, i, periodic)
        v_out[j], w_out[j] = _sample_fan_array(m, counts[i], fans[i], vl, wl, vr, wr, xi)


@njit(cache=True)
def _godunov_update(m, v, w, dx, dt, periodic, fans, counts, v_out, w_out):
    n = v.shape[0]
    Fv = np.empty(n + 1)
    Fw = np.empty(n + 1)
    for i in range(n + 1):
        vl, wl, vr, wr = _side_states(v, w, i, periodic)
        vs, ws = _sample_fan_array(m, counts[i], fans[i], vl, wl, vr, wr, 0.0)
        Fv[i] = -(ws * ws * ws + m * ws)
        Fw[i] = -vs
    if periodic:
        Fv[n] = Fv[0]
        Fw[n] = Fw[0]
    for j in range(n):
        v_out[j] = v[j] - dt / dx * (Fv[j + 1] - Fv[j])
        w_out[j] = w[j] - dt / dx * (Fw[j + 1] - Fw[j])


def _fans(params: ModelParams, grid: MovingGrid):
    n = grid.n_cells
    fans = np.zeros((n + 1, MAX_WAVES, 8))
    counts = np.zeros(n + 1, dtype=np.int64)
    bad, smax = _interface_fans(params.m, params.beta, grid.v_avg, grid.w_avg, grid.periodic,
                                fans, counts)
    if bad >= 0:
        raise SchemeError(f"Riemann solver failed at interface {bad}, step {grid.step_index}")
    return fans, counts, smax


def _next_grid(grid: MovingGrid, v, w, dt) -> MovingGrid:
    time, time_lo = _two_sum(grid.time, grid.time_lo, dt)
    return MovingGrid(grid.n_cells, grid.dx, grid.left_edge, time, v, w, grid.boundary,
                      grid.step_index + 1, grid.edge_lo, time_lo)


def glimm_advance(grid: MovingGrid, params: ModelParams, rng: RngStream, cfl: float = 0.45,
                  dt_max: float = math.inf) -> tuple[MovingGrid, ReferenceInfo]:
    """One Glimm step with ``dt * max|speed| = cfl * dx``.

    ``cfl <= 1/2`` keeps neighbouring interface fans from meeting.
    """
    if not 0.0 < cfl <= 0.5:
        raise ValueError(f"Glimm needs 0 < cfl <= 1/2, got {cfl}")
    fans, counts, smax = _fans(params, grid)
    dt = min(cfl * grid.dx / smax, dt_max)
    r = rng.uniform() * grid.dx
    v = np.empty_like(grid.v_avg)
    w = np.empty_like(grid.w_avg)
    _glimm_sample(params.m, grid.v_avg, grid.w_avg, grid.dx, dt, r, grid.periodic, fans, counts, v, w)
    return _next_grid(grid, v, w, dt), ReferenceInfo(dt, smax, r)


def glimm_step(grid: MovingGrid, params: ModelParams, rng: RngStream, cfl: float = 0.45,
               dt_max: float = math.inf) -> MovingGrid:
    return glimm_advance(grid, params, rng, cfl, dt_max)[0]


def godunov_advance(grid: MovingGrid, params: ModelParams, cfl: float = 0.45,
                    dt_max: float = math.inf) -> tuple[MovingGrid, ReferenceInfo]:
    fans, counts, smax = _fans(params, grid)
    dt = min(cfl * grid.dx / smax, dt_max)
    v = np.empty_like(grid.v_avg)
    w = np.empty_like(grid.w_avg)
    _godunov_update(params.m, grid.v_avg, grid.w_avg, grid.dx, dt, grid.periodic, fans, counts, v, w)
    return _next_grid(grid, v, w, dt), ReferenceInfo(dt, smax)


def godunov_step(grid: MovingGrid, params: ModelParams, cfl: float = 0.45,
                 dt_max: float = math.inf) -> MovingGrid:
    return godunov_advance(grid, params, cfl, dt_max)[0]
