"""Post-processing of snapshots: projections, errors and shock diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from ..model import ModelParams, State
from ..riemann import ElementaryWave, WaveFan, WaveKind, _c_integral, sample_fan, solve_riemann
from .runner import Snapshot

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------------------
# projection


@njit(cache=True)
def _project(left_edge, dx, v, w, periodic, period, edges, out_v, out_w):
    n = v.shape[0]
    for t in range(edges.shape[0] - 1):
        a = edges[t]
        b = edges[t + 1]
        if periodic:
            shift = math.floor((a - left_edge) / period) * period
            a -= shift
            b -= shift
        k0 = int(math.floor((a - left_edge) / dx))
        k1 = int(math.ceil((b - left_edge) / dx))
        sv = 0.0
        sw = 0.0
        total = 0.0
        pieces = 0
        last = 0
        for k in range(k0, k1):
            lo = max(a, left_edge + k * dx)
            hi = min(b, left_edge + (k + 1) * dx)
            if hi <= lo:
                continue
            if periodic:
                idx = k % n
            else:
                idx = min(max(k, 0), n - 1)
            length = hi - lo
            sv += length * v[idx]
            sw += length * w[idx]
            total += length
            pieces += 1
            last = idx
        if pieces == 1:
            out_v[t] = v[last]
            out_w[t] = w[last]
        else:
            out_v[t] = sv / total
            out_w[t] = sw / total


def resample_to_fixed_grid(snap: Snapshot, edges) -> tuple[np.ndarray, np.ndarray]:
    """Overlap-weighted averages of ``snap`` on cells bounded by ``edges``.

    Periodic snapshots wrap around; otherwise the end cells extend as
    constants, matching the constant-state boundary.
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
        raise ValueError("edges must be a strictly increasing 1-d array")
    out_v = np.empty(edges.size - 1)
    out_w = np.empty(edges.size - 1)
    periodic = snap.period is not None
    _project(snap.left_edge, snap.dx, snap.v, snap.w, periodic, snap.period if periodic else 0.0,
             edges, out_v, out_w)
    return out_v, out_w


def fixed_edges(x_lo: float, x_hi: float, n_cells: int) -> np.ndarray:
    return x_lo + (x_hi - x_lo) / n_cells * np.arange(n_cells + 1)


# ---------------------------------------------------------------------------
# exact Riemann solutions


@dataclass(frozen=True)
class ExactRiemann:
    """Self-similar solution of a Riemann problem at time ``t``.

    Calling it samples the fan pointwise; :meth:`mean` gives exact cell
    averages (constant pieces exactly, rarefactions by Gauss-Legendre in the
    strain variable, where the integrand is smooth).
    """

    params: ModelParams
    left: State
    right: State
    t: float
    x0: float = 0.0

    @property
    def fan(self) -> WaveFan:
        return solve_riemann(self.params, self.left, self.right)

    def at(self, t: float) -> "ExactRiemann":
        return ExactRiemann(self.params, self.left, self.right, t, self.x0)

    def __call__(self, x):
        fan = self.fan
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([sample_fan(self.params, fan, (xx - self.x0) / self.t) if self.t > 0
                        else (self.left if xx < self.x0 else self.right) for xx in xs])
        return out[:, 0], out[:, 1]

    def shock_positions(self) -> list[tuple[ElementaryWave, float]]:
        return [(wave, self.x0 + wave.speed_lo * self.t) for wave in self.fan.waves if wave.is_shock]

    def mean(self, lo: float, hi: float) -> tuple[float, float]:
        if not hi > lo:
            raise ValueError("need hi > lo")
        if self.t <= 0.0:
            pieces = [(-math.inf, self.x0, ("const", self.left)), (self.x0, math.inf, ("const", self.right))]
        else:
            pieces = self._pieces()
        sv = sw = 0.0
        n_pieces = 0
        only = None
        for a, b, (kind, payload) in pieces:
            a2, b2 = max(a, lo), min(b, hi)
            if b2 <= a2:
                continue
            n_pieces += 1
            if kind == "const":
                only = payload
                sv += (b2 - a2) * payload[0]
                sw += (b2 - a2) * payload[1]
            else:
                only = None
                iv, iw = self._rarefaction_integral(payload, a2, b2)
                sv += iv
                sw += iw
        if n_pieces == 1 and only is not None:
            return float(only[0]), float(only[1])
        return sv / (hi - lo), sw / (hi - lo)

    def _pieces(self):
        fan = self.fan
        out = []
        x_prev = -math.inf
        state = fan.left_data
        for wave in fan.waves:
            xa = self.x0 + wave.speed_lo * self.t
            xb = self.x0 + wave.speed_hi * self.t
            out.append((x_prev, xa, ("const", wave.left)))
            if wave.kind is WaveKind.RAREFACTION:
                out.append((xa, xb, ("fan", wave)))
            x_prev = xb
            state = wave.right
        out.append((x_prev, math.inf, ("const", state)))
        return out

    def _rarefaction_integral(self, wave, a: float, b: float) -> tuple[float, float]:
        m = self.params.m
        sgn_f = -1.0 if wave.family == 1 else 1.0
        sgn_w = 1.0 if wave.left.w + wave.right.w > 0.0 else -1.0

        def strain(x):
            xi = (x - self.x0) / self.t
            return sgn_w * math.sqrt(max((xi * xi - m) / 3.0, 0.0))

        wa, wb = strain(a), strain(b)
        half = 0.5 * (wb - wa)
        ws = 0.5 * (wa + wb) + half * _GL_X
        c = np.sqrt(3.0 * ws * ws + m)
        # dx = t * dxi = t * sgn_f * c'(w) dw with c'(w) = 3 w / c
        jac = self.t * sgn_f * 3.0 * ws / c
        dv = np.array([_c_integral(m, z) for z in ws]) - _c_integral(m, wave.left.w)
        vs = wave.left.v + dv if wave.family == 1 else wave.left.v - dv
        iv = half * float(np.sum(_GL_W * vs * jac))
        iw = half * float(np.sum(_GL_W * ws * jac))
        return iv, iw

    def project(self, edges) -> tuple[np.ndarray, np.ndarray]:
        edges = np.asarray(edges, dtype=float)
        out = np.array([self.mean(a, b) for a, b in zip(edges[:-1], edges[1:])])
        return out[:, 0], out[:, 1]


def snapshot_edges(snap: Snapshot) -> np.ndarray:
    return snap.left_edge + snap.dx * np.arange(snap.n_cells + 1)


def l1_error(snap: Snapshot, exact) -> tuple[float, float]:
    """``sum_j |u_j - mean of exact over cell j| * dx`` for ``v`` and ``w``.

    ``exact`` must provide ``mean(lo, hi) -> (v, w)``; for a time-dependent
    solution such as :class:`ExactRiemann` it is evaluated at ``snap.time``.
    """
    if isinstance(exact, ExactRiemann):
        exact = exact.at(snap.time)
    edges = snapshot_edges(snap)
    ref = np.array([exact.mean(a, b) for a, b in zip(edges[:-1], edges[1:])])
    ev = float(np.sum(np.abs(snap.v - ref[:, 0])) * snap.dx)
    ew = float(np.sum(np.abs(snap.w - ref[:, 1])) * snap.dx)
    return ev, ew


def max_error(snap: Snapshot, exact) -> tuple[float, float]:
    if isinstance(exact, ExactRiemann):
        exact = exact.at(snap.time)
    edges = snapshot_edges(snap)
    ref = np.array([exact.mean(a, b) for a, b in zip(edges[:-1], edges[1:])])
    return float(np.max(np.abs(snap.v - ref[:, 0]))), float(np.max(np.abs(snap.w - ref[:, 1])))


# ---------------------------------------------------------------------------
# sign changes and shocks


def sign_change_indices(snap: Snapshot, circular: bool = False) -> np.ndarray:
    """Indices ``j`` (window order) with ``w_j > 0`` differing from ``w_{j+1} > 0``.

    Periodic snapshots are first rotated into their reference window.  With
    ``circular`` the pair ``(n-1, 0)`` is included as index ``n-1``.
    """
    s = snap.windowed()
    pos = s.w > 0.0
    idx = np.nonzero(pos[:-1] != pos[1:])[0]
    if circular and pos[-1] != pos[0]:
        idx = np.append(idx, s.n_cells - 1)
    return idx


def count_sign_changes(snap: Snapshot, circular: bool = False) -> int:
    """Sign changes of ``w`` read left to right across the window.

    The linear count (default) is what a plot of one period shows; on a
    periodic domain the circular count is always even.
    """
    return int(sign_change_indices(snap, circular).size)


def _refine(w: np.ndarray, j: int, edge: float, dx: float, periodic: bool) -> float:
    """Position of the jump between cells ``j`` and ``j+1`` (left edge ``edge``)."""
    n = w.size

    def at(k):
        return w[k % n] if periodic else w[min(max(k, 0), n - 1)]

    best, best_jump = edge + (j + 1) * dx, -1.0
    for k in (j, j + 1):
        wl, wk, wr = at(k - 1), at(k), at(k + 1)
        jump = abs(wl - wr)
        if jump > 0.0 and min(wl, wr) < wk < max(wl, wr) and jump > best_jump:
            # conservation inside cell k: fraction of the cell holding the left state
            frac = (wk - wr) / (wl - wr)
            best, best_jump = edge + (k + frac) * dx, jump
    return best


def shock_positions(snap: Snapshot) -> list[float]:
    """Locations where ``w`` changes sign, refined inside the steepest cell.

    If one of the two cells around a sign change holds a value strictly
    between its neighbours, it is read as a cut cell and the jump is placed
    where conservation puts it; otherwise the shared interface is returned.
    """
    s = snap.windowed()
    periodic = s.period is not None
    idx = sign_change_indices(s, circular=periodic)
    return [_refine(s.w, int(j), s.left_edge, s.dx, periodic) for j in idx]


def circular_gaps(positions, period: float) -> np.ndarray:
    """Distances between consecutive positions around the circle."""
    p = np.sort(np.mod(np.asarray(positions, dtype=float), period))
    if p.size < 2:
        return np.zeros(0)
    return np.diff(np.append(p, p[0] + period))


def close_shock_pairs(snap: Snapshot, gap: float) -> int:
    """Number of consecutive sign changes of ``w`` closer than ``gap``."""
    pos = shock_positions(snap)
    if snap.period is not None:
        d = circular_gaps(pos, snap.period)
    else:
        d = np.diff(np.sort(pos))
    return int(np.sum(d < gap))


def locate_jump(snap: Snapshot, a: float, b: float, u_left: float, u_right: float,
                variable: str = "w") -> float:
    """Position of a single jump ``u_left -> u_right`` inside ``[a, b]`` by conservation.

    Uses ``integral_a^b u = u_left (p - a) + u_right (b - p)``; the window must
    hold exactly one jump and plateaus otherwise.
    """
    edges = np.array([a, b])
    pv, pw = resample_to_fixed_grid(snap, edges)
    mean = (pv if variable == "v" else pw)[0]
    return a + (b - a) * (mean - u_right) / (u_left - u_right)


def transition_cells(snap: Snapshot, lo: float, hi: float, u_left: float, u_right: float,
                     rel_tol: float = 0.01, variable: str = "w") -> int:
    """Cells centred in ``[lo, hi]`` whose value lies strictly between two plateaus.

    Values within ``rel_tol * |u_left - u_right|`` of either plateau count as
    plateau cells.
    """
    x = snap.x_center
    u = snap.v if variable == "v" else snap.w
    tol = rel_tol * abs(u_left - u_right)
    a, b = min(u_left, u_right) + tol, max(u_left, u_right) - tol
    sel = (x >= lo) & (x <= hi)
    return int(np.sum((u[sel] > a) & (u[sel] < b)))


@dataclass(frozen=True)
class Spike:
    height: float
    peak: float
    width: int


def spike_diagnostics(snap: Snapshot, lo: float, hi: float, w_left: float, w_right: float,
                      tol: float = 1e-3) -> Spike:
    """Overshoot of ``w`` beyond both plateau values inside ``[lo, hi]``.

    ``height`` is the largest distance to the nearer plateau among cells
    outside the plateau range, ``peak`` the extreme value reached and
    ``width`` the number of cells outside ``[min, max]`` of the plateaus.
    """
    x = snap.x_center
    sel = (x >= lo) & (x <= hi)
    w = snap.w[sel]
    top, bot = max(w_left, w_right), min(w_left, w_right)
    out = (w > top + tol) | (w < bot - tol)
    if not np.any(out):
        return Spike(0.0, float("nan"), 0)
    dev = np.minimum(np.abs(w - w_left), np.abs(w - w_right))
    k = int(np.argmax(np.where(out, dev, -1.0)))
    return Spike(float(dev[k]), float(w[k]), int(np.sum(out)))


def relative_drift(initial: tuple[float, float], final: tuple[float, float],
                   scale: Optional[tuple[float, float]] = None) -> tuple[float, float]:
    """``|final - initial| / max(|initial|, scale)`` per variable.

    ``scale`` guards variables whose total vanishes (a zero-mean strain).
    """
    scale = scale or (0.0, 0.0)
    out = []
    for a, b, s in zip(initial, final, scale):
        denom = max(abs(a), s)
        out.append(abs(b - a) / denom if denom > 0 else abs(b - a))
    return out[0], out[1]
